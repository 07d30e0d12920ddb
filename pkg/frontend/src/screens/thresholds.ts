// Threshold screen: the computed risk category drives the resolved
// defaults; overrides are validated live against the parity-containment
// rule before they can be applied.

import type { Ctx } from '../wizard.js';
import { valueSpan } from '../format.js';
import { validateOverrides } from '../validate.js';
import type { SectorPolicy } from '../types.js';

const SECTORS = ['generic', 'telecom', 'finance', 'healthcare', 'recruitment'];

export function renderThresholds(root: HTMLElement, ctx: Ctx): void {
  const doc = root.ownerDocument;
  const state = ctx.store.get();
  const session = state.session;
  if (!session) return;
  const survey = session.payloads.SurveyIntake;
  if (!survey) return;
  const config = session.payloads.ThresholdSpecification;

  const heading = doc.createElement('h2');
  heading.textContent = 'Metric thresholds';
  root.appendChild(heading);

  const driver = doc.createElement('p');
  driver.className = 'threshold-driver';
  const badge = doc.createElement('strong');
  badge.dataset.name = 'risk-category';
  badge.textContent = survey.risk_profile.category;
  driver.append('Defaults below are calibrated for the computed risk category: ');
  driver.appendChild(badge);
  driver.append('. Stricter categories shrink every interval around its parity value.');
  root.appendChild(driver);

  const form = doc.createElement('form');
  form.className = 'config-form';

  const modelLabel = doc.createElement('label');
  modelLabel.append('Model version ');
  const versionInput = doc.createElement('input');
  versionInput.name = 'model-version';
  versionInput.value = state.pendingModelVersion || config?.model_profile.version || '';
  versionInput.addEventListener('input', () => {
    ctx.store.get().pendingModelVersion = versionInput.value;
  });
  modelLabel.appendChild(versionInput);
  form.appendChild(modelLabel);

  const sectorLabel = doc.createElement('label');
  sectorLabel.append('Sector ');
  const sectorSelect = doc.createElement('select');
  sectorSelect.name = 'sector';
  for (const sector of SECTORS) {
    const option = doc.createElement('option');
    option.value = sector;
    option.textContent = sector;
    if ((config?.sector_policy.sector || state.pendingSector) === sector) {
      option.selected = true;
    }
    sectorSelect.appendChild(option);
  }
  sectorSelect.addEventListener('change', () => {
    ctx.store.get().pendingSector = sectorSelect.value;
  });
  sectorLabel.appendChild(sectorSelect);
  form.appendChild(sectorLabel);

  const problemsBox = doc.createElement('div');
  problemsBox.className = 'override-problems';

  const apply = doc.createElement('button');
  apply.type = 'submit';
  apply.textContent = config ? 'Re-resolve thresholds' : 'Resolve thresholds';

  if (config) {
    const spec = config.threshold_spec;
    const table = doc.createElement('table');
    table.className = 'threshold-table';
    const header = doc.createElement('tr');
    header.innerHTML =
      '<th>Metric</th><th>Lower</th><th>Upper</th><th>Source</th>' +
      '<th>Override lower</th><th>Override upper</th>';
    table.appendChild(header);
    for (const [metric, entry] of Object.entries(spec.metrics)) {
      const tr = doc.createElement('tr');
      tr.dataset.metric = metric;
      const name = doc.createElement('td');
      name.textContent = metric;
      const lower = doc.createElement('td');
      lower.appendChild(valueSpan(doc, entry.lower, `bound-${metric}-lower`));
      const upper = doc.createElement('td');
      upper.appendChild(valueSpan(doc, entry.upper, `bound-${metric}-upper`));
      const source = doc.createElement('td');
      source.textContent = entry.provenance;
      tr.append(name, lower, upper, source);

      for (const side of [0, 1] as const) {
        const td = doc.createElement('td');
        const input = doc.createElement('input');
        input.type = 'number';
        input.step = 'any';
        input.name = `override-${metric}-${side === 0 ? 'lower' : 'upper'}`;
        const existing = ctx.store.get().pendingOverrides[metric];
        if (existing) input.value = String(existing[side]);
        input.addEventListener('input', () => {
          const s = ctx.store.get();
          const current = s.pendingOverrides[metric] ?? [entry.lower, entry.upper];
          const next: [number, number] = [...current] as [number, number];
          next[side] = Number(input.value);
          if (input.value === '') {
            const { [metric]: _, ...rest } = s.pendingOverrides;
            ctx.store.get().pendingOverrides = rest;
          } else {
            ctx.store.get().pendingOverrides = { ...s.pendingOverrides, [metric]: next };
          }
          const problems = validateOverrides(ctx.store.get().pendingOverrides, spec.metrics);
          problemsBox.textContent = Object.entries(problems)
            .map(([m, p]) => `${m}: ${p}`)
            .join('; ');
          apply.disabled = Object.keys(problems).length > 0;
          tr.classList.toggle('invalid', metric in problems);
        });
        td.appendChild(input);
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    form.appendChild(table);
    const version = doc.createElement('p');
    version.className = 'table-version';
    version.textContent = `Threshold table ${spec.table_version}, category ${spec.category}.`;
    form.appendChild(version);
  } else {
    const note = doc.createElement('p');
    note.textContent = 'Resolve the defaults to see the per-metric bounds.';
    form.appendChild(note);
  }

  form.appendChild(problemsBox);
  form.appendChild(apply);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void ctx.run(async () => {
      const s = ctx.store.get();
      if (!s.session) return;
      const downstream = 'ProxyFeatureReview' in s.session.payloads;
      if (config && downstream) {
        const ok = ctx.confirmAction(
          'Changing the configuration invalidates the dataset review, results, ' +
            'and verdict. Continue?',
        );
        if (!ok) return;
      }
      const policy: SectorPolicy = { sector: sectorSelect.value };
      if (Object.keys(s.pendingOverrides).length > 0) {
        policy.threshold_overrides = s.pendingOverrides;
      }
      await ctx.api.submitConfig(
        s.session.session_id,
        {
          model_type: 'machine-learning',
          task: 'binary-classification',
          purpose: '',
          intended_use: '',
          version: versionInput.value,
        },
        policy,
      );
      await ctx.refresh();
    });
  });
  root.appendChild(form);

  if (config) {
    const cont = doc.createElement('button');
    cont.className = 'continue';
    cont.textContent = 'Continue to dataset';
    cont.addEventListener('click', () => ctx.goto('ProxyFeatureReview'));
    root.appendChild(cont);
  }
}
