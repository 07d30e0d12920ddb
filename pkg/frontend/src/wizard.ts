// Stage routing and the shared screen context. The session snapshot from
// the service decides which screens are reachable; a 409 from the API
// routes the user back to the earliest incomplete stage.

import { ApiClient, ApiRequestError } from './api.js';
import { Store } from './store.js';
import type { Stage } from './types.js';
import { STAGES } from './types.js';
import { earliestIncompleteStage, reachableStages } from './validate.js';
import { renderSurvey } from './screens/survey.js';
import { renderThresholds } from './screens/thresholds.js';
import { renderDataset } from './screens/dataset.js';
import { renderResults } from './screens/results.js';
import { renderVerdict } from './screens/verdict.js';

export interface Ctx {
  api: ApiClient;
  store: Store;
  refresh: () => Promise<void>;
  run: (fn: () => Promise<void>) => Promise<void>;
  goto: (stage: Stage) => void;
  confirmAction: (message: string) => boolean;
  saveBlob: (blob: Blob, filename: string) => void;
}

const SCREEN_TITLES: Record<Stage, string> = {
  SurveyIntake: 'Survey',
  ThresholdSpecification: 'Thresholds',
  ProxyFeatureReview: 'Dataset',
  Inference: 'Results',
  CompositeScoring: 'Verdict',
  Complete: 'Verdict',
};

const SCREENS: Record<Stage, (root: HTMLElement, ctx: Ctx) => void> = {
  SurveyIntake: renderSurvey,
  ThresholdSpecification: renderThresholds,
  ProxyFeatureReview: renderDataset,
  Inference: renderResults,
  CompositeScoring: renderVerdict,
  Complete: renderVerdict,
};

export function createCtx(api: ApiClient, store: Store, doc: Document): Ctx {
  const ctx: Ctx = {
    api,
    store,
    async refresh() {
      const s = store.get();
      if (!s.session) return;
      const session = await api.getSession(s.session.session_id);
      store.set({ session });
    },
    async run(fn) {
      store.set({ busy: true, error: null });
      try {
        await fn();
        store.set({ busy: false });
      } catch (err) {
        if (err instanceof ApiRequestError) {
          store.set({ busy: false, error: `${err.code}: ${err.message}` });
          if (err.status === 409) {
            // stage-order violation: land on the earliest incomplete stage
            await ctx.refresh();
            const session = store.get().session;
            if (session) store.set({ activeStage: earliestIncompleteStage(session) });
          }
        } else {
          store.set({ busy: false, error: String(err) });
          throw err;
        }
      }
    },
    goto(stage) {
      store.set({ activeStage: stage });
    },
    confirmAction(message) {
      const w = doc.defaultView as (Window & typeof globalThis) | null;
      return w?.confirm ? w.confirm(message) : true;
    },
    saveBlob(blob, filename) {
      const w = doc.defaultView as (Window & typeof globalThis) | null;
      if (!w?.URL?.createObjectURL) return;
      const url = w.URL.createObjectURL(blob);
      const a = doc.createElement('a');
      a.href = url;
      a.download = filename;
      doc.body.appendChild(a);
      a.click();
      a.remove();
      w.URL.revokeObjectURL(url);
    },
  };
  return ctx;
}

export function renderApp(root: HTMLElement, ctx: Ctx): () => void {
  const doc = root.ownerDocument;
  root.innerHTML = '';

  const title = doc.createElement('h1');
  title.textContent = 'Fairness audit';
  root.appendChild(title);

  const sessionLine = doc.createElement('p');
  sessionLine.className = 'session-line';
  root.appendChild(sessionLine);

  const errorBox = doc.createElement('div');
  errorBox.className = 'error-box';
  root.appendChild(errorBox);

  const nav = doc.createElement('nav');
  nav.className = 'wizard-nav';
  root.appendChild(nav);

  const content = doc.createElement('section');
  content.className = 'wizard-content';
  root.appendChild(content);

  function sync() {
    const state = ctx.store.get();
    const session = state.session;
    sessionLine.textContent = session
      ? `Session ${session.session_id} (revision ${session.revision}, stage ${session.stage})`
      : 'No session';
    errorBox.textContent = state.error ?? '';
    errorBox.style.display = state.error ? 'block' : 'none';

    nav.innerHTML = '';
    const reachable = reachableStages(session);
    // CompositeScoring and Complete share the verdict screen
    const tabs = STAGES.filter((s) => s !== 'Complete');
    tabs.forEach((stage, idx) => {
      const button = doc.createElement('button');
      button.textContent = `${idx + 1}. ${SCREEN_TITLES[stage]}`;
      button.dataset.stage = stage;
      const active =
        state.activeStage === stage ||
        (stage === 'CompositeScoring' && state.activeStage === 'Complete');
      if (active) button.classList.add('active');
      const enabled =
        reachable.includes(stage) ||
        (stage === 'CompositeScoring' && reachable.includes('Complete'));
      button.disabled = !enabled || state.busy;
      button.addEventListener('click', () => ctx.goto(stage));
      nav.appendChild(button);
    });

    content.innerHTML = '';
    SCREENS[state.activeStage](content, ctx);
  }

  sync();
  return ctx.store.subscribe(sync);
}

export async function startSession(ctx: Ctx, existingId?: string): Promise<void> {
  const bank = await ctx.api.questionBank();
  let session;
  if (existingId) {
    session = await ctx.api.getSession(existingId);
  } else {
    session = await ctx.api.createSession();
  }
  const ratings: Record<string, number> = {};
  for (const response of session.payloads.SurveyIntake?.responses ?? []) {
    ratings[response.item_id] = response.rating;
  }
  ctx.store.set({
    session,
    questionBank: bank,
    pendingRatings: ratings,
    activeStage: session.stage === 'Complete' ? 'CompositeScoring' : session.stage,
  });
}
