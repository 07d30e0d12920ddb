// Browser entry point. The session id rides in the URL hash so a refresh
// rebuilds every screen from GET /sessions/{id} alone.

import { ApiClient } from './api.js';
import { Store, initialState } from './store.js';
import { createCtx, renderApp, startSession } from './wizard.js';

declare global {
  interface Window {
    NISHPAKSH_API_BASE?: string;
  }
}

export async function boot(root: HTMLElement): Promise<void> {
  const win = root.ownerDocument.defaultView as (Window & typeof globalThis) | null;
  const base = win?.NISHPAKSH_API_BASE ?? 'http://127.0.0.1:8680';
  const api = new ApiClient(base);
  const store = new Store(initialState());
  const ctx = createCtx(api, store, root.ownerDocument);
  renderApp(root, ctx);

  const hash = win?.location.hash ?? '';
  const existing = hash.startsWith('#s=') ? hash.slice(3) : undefined;
  try {
    await startSession(ctx, existing);
    const session = store.get().session;
    if (win && session) win.location.hash = `s=${session.session_id}`;
  } catch (err) {
    store.set({ error: String(err) });
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void boot(document.getElementById('app') as HTMLElement);
}
