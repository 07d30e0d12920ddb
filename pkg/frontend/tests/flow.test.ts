// Dashboard contract test: a scripted browser flow against a real
// service instance covers survey -> thresholds -> dataset upload ->
// evaluate -> score -> report download, then checks that every number on
// the verdict screen equals the corresponding field of the downloaded
// JSON report.

import { spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, expect, test } from 'vitest';

import { ApiClient } from '../src/api.js';
import { Store, initialState } from '../src/store.js';
import { createCtx, renderApp, startSession, type Ctx } from '../src/wizard.js';

const PORT = 18000 + Math.floor(Math.random() * 20000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function until(check: () => boolean, what: string, timeoutMs = 20_000): Promise<void> {
  console.log(`waiting: ${what}`);
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > timeoutMs) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 25));
  }
}

async function serviceReady(): Promise<void> {
  const start = Date.now();
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/api/v1/question-bank`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() - start > 60_000) throw new Error('service did not come up');
    await new Promise((r) => setTimeout(r, 200));
  }
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), 'nishpaksh-dash-'));
  server = spawn(
    'python3',
    [
      '-c',
      'from nishpaksh.service import create_app; import uvicorn, sys; ' +
        `uvicorn.run(create_app(data_dir=sys.argv[1]), host="127.0.0.1", port=${PORT}, log_level="warning")`,
      dataDir,
    ],
    { stdio: 'ignore' },
  );
  server.unref();
  await serviceReady();
});

afterAll(() => {
  server?.kill('SIGKILL');
});

function syntheticCsv(n: number): string {
  // deterministic synthetic predictions with a strong group_a rate gap
  const lines = ['x1,x2,group_a,group_b,label,prediction'];
  let state = 12345;
  const rand = () => {
    state = (state * 48271) % 2147483647;
    return state / 2147483647;
  };
  for (let i = 0; i < n; i++) {
    const a = rand() < 0.5 ? 1 : 0;
    const b = rand() < 0.5 ? 1 : 0;
    const label = rand() < 0.5 ? 1 : 0;
    const p = a === 1 ? 0.75 : 0.3;
    const prediction = rand() < p ? 1 : 0;
    lines.push(`${rand().toFixed(4)},${rand().toFixed(4)},${a},${b},${label},${prediction}`);
  }
  return lines.join('\n') + '\n';
}

function click(el: Element | null): void {
  expect(el, 'expected element to click').not.toBeNull();
  (el as HTMLElement).click();
}

function state(ctx: Ctx) {
  return ctx.store.get();
}

test('scripted flow matches the downloaded report', async () => {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const api = new ApiClient(BASE);
  const store = new Store(initialState());
  const ctx = createCtx(api, store, document);
  renderApp(root, ctx);
  await startSession(ctx);
  await until(() => state(ctx).session !== null, 'session creation');

  // --- survey: rate everything, one deliberately different domain ---
  await until(() => root.querySelectorAll('.survey-item').length === 35, 'survey screen');
  for (const item of Array.from(root.querySelectorAll('.survey-item'))) {
    const id = (item as HTMLElement).dataset.itemId!;
    const rating = id.startsWith('data-') ? 4 : 3;
    const radio = item.querySelector(`input[value="${rating}"]`) as HTMLInputElement;
    radio.checked = true;
    radio.dispatchEvent(new Event('change', { bubbles: true }));
  }
  await until(
    () =>
      !(root.querySelector('.survey-form button[type=submit]') as HTMLButtonElement)
        .disabled,
    'survey submit enabled',
  );
  click(root.querySelector('.survey-form button[type=submit]'));
  await until(() => !!state(ctx).session?.payloads.SurveyIntake, 'risk profile');

  // the risk profile panel appears before moving on
  const badge = root.querySelector('.risk-profile [data-name=risk-category]');
  expect(badge?.textContent).toBe(
    state(ctx).session!.payloads.SurveyIntake!.risk_profile.category,
  );
  click(root.querySelector('button.continue'));

  // --- thresholds: resolve defaults for the computed category ---
  await until(
    () => root.querySelector('.config-form button[type=submit]') !== null,
    'threshold screen',
  );
  expect(root.querySelector('.threshold-driver [data-name=risk-category]')?.textContent).toBe(
    state(ctx).session!.payloads.SurveyIntake!.risk_profile.category,
  );
  click(root.querySelector('.config-form button[type=submit]'));
  await until(
    () => !!state(ctx).session?.payloads.ThresholdSpecification,
    'resolved thresholds',
  );
  await until(() => root.querySelector('.threshold-table') !== null, 'threshold table');
  click(root.querySelector('button.continue'));

  // --- dataset: upload CSV through the file input and map roles ---
  await until(() => root.querySelector('.dataset-form') !== null, 'dataset screen');
  const csv = syntheticCsv(400);
  const file = new File([csv], 'synthetic.csv', { type: 'text/csv' });
  const fileInput = root.querySelector('.dataset-form input[type=file]') as HTMLInputElement;
  Object.defineProperty(fileInput, 'files', { value: [file], configurable: true });
  fileInput.dispatchEvent(new Event('change', { bubbles: true }));
  await until(
    () => root.querySelectorAll('.column-mapping select').length === 6,
    'column mapping',
  );
  const roleByColumn: Record<string, string> = {
    x1: 'feature',
    x2: 'feature',
    group_a: 'sensitive',
    group_b: 'sensitive',
    label: 'label',
    prediction: 'prediction',
  };
  for (const select of Array.from(root.querySelectorAll('.column-mapping select'))) {
    const column = (select as HTMLElement).dataset.column!;
    (select as HTMLSelectElement).value = roleByColumn[column];
    select.dispatchEvent(new Event('change', { bubbles: true }));
  }
  const uploadButton = root.querySelector('.dataset-form button[type=submit]');
  await until(() => !(uploadButton as HTMLButtonElement).disabled, 'upload enabled');
  click(uploadButton);
  await until(
    () => !!state(ctx).session?.payloads.ProxyFeatureReview,
    'proxy findings',
    90_000,
  );
  expect(root.querySelectorAll('.proxy-table tr').length).toBeGreaterThan(1);
  click(root.querySelector('button.continue'));

  // --- evaluate ---
  await until(() => root.querySelector('.evaluate-form') !== null, 'results screen');
  const seedInput = root.querySelector('.evaluate-form input[name=seed]') as HTMLInputElement;
  seedInput.value = '42';
  const repInput = root.querySelector(
    '.evaluate-form input[name=replicates]',
  ) as HTMLInputElement;
  repInput.value = '150';
  click(root.querySelector('.evaluate-form button[type=submit]'));
  await until(() => !!state(ctx).session?.payloads.Inference, 'inference payload', 120_000);
  await until(() => root.querySelectorAll('.metric-table').length > 0, 'metric tables');
  click(root.querySelector('button.continue'));

  // --- score ---
  await until(() => root.querySelector('.compute-verdict') !== null, 'verdict screen');
  click(root.querySelector('.compute-verdict'));
  await until(() => state(ctx).session?.stage === 'Complete', 'scoring complete');
  await until(() => root.querySelector('[data-name=fairness-score]') !== null, 'verdict view');

  // --- report download and number-for-number comparison ---
  const sessionId = state(ctx).session!.session_id;
  const report = await api.reportJson(sessionId);

  const read = (name: string): number | null => {
    const el = root.querySelector(`[data-name="${name}"]`) as HTMLElement | null;
    expect(el, `verdict screen field ${name}`).not.toBeNull();
    const raw = el!.dataset.value!;
    return raw === 'null' ? null : Number(raw);
  };

  expect(read('fairness-score')).toBe(report.summary.fairness_score);
  expect(read('fairness-score-clamped')).toBe(report.summary.fairness_score_clamped);
  for (const [attribute, bi] of Object.entries(report.tabulation.bias_index)) {
    expect(read(`bias-index-${attribute}`)).toBe(bi);
  }
  const verdictChip = root.querySelector('[data-name=overall-verdict]') as HTMLElement;
  expect(verdictChip.textContent!.toLowerCase()).toBe(report.summary.overall_verdict);
  for (const row of report.tabulation.metrics) {
    expect(read(`check-${row.metric}-${row.attribute}`)).toBe(row.value);
  }

  // the download buttons fetch the rendered artifacts
  const markdown = await (await api.report(sessionId, 'markdown')).text();
  expect(markdown).toContain('## Summary');
  const checkpoint = JSON.parse(await (await api.checkpoint(sessionId)).text());
  expect(checkpoint.session_id).toBe(sessionId);
  for (const button of Array.from(root.querySelectorAll('button.download'))) {
    click(button);
  }
  await until(() => !state(ctx).busy, 'downloads settled');
  expect(state(ctx).error).toBeNull();

  // refresh safety: a fresh app over GET /sessions/{id} reproduces the verdict
  const root2 = document.createElement('div');
  document.body.appendChild(root2);
  const store2 = new Store(initialState());
  const ctx2 = createCtx(api, store2, document);
  renderApp(root2, ctx2);
  await startSession(ctx2, sessionId);
  await until(
    () => root2.querySelector('[data-name=fairness-score]') !== null,
    'verdict after refresh',
  );
  const fresh = root2.querySelector('[data-name=fairness-score]') as HTMLElement;
  expect(Number(fresh.dataset.value)).toBe(report.summary.fairness_score);
});

test('stage-order violation routes back to the earliest incomplete stage', async () => {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const api = new ApiClient(BASE);
  const store = new Store(initialState());
  const ctx = createCtx(api, store, document);
  renderApp(root, ctx);
  await startSession(ctx);
  await until(() => state(ctx).session !== null, 'session');

  // bypass the UI guard rails and hit the API out of order
  await ctx.run(async () => {
    await api.evaluate(state(ctx).session!.session_id, { seed: 1 });
  });
  expect(state(ctx).error).toContain('STAGE_ORDER_VIOLATION');
  expect(state(ctx).activeStage).toBe('SurveyIntake');
});
