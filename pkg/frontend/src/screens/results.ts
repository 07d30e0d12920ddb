// Results screen: per-attribute metric table with CI bars, subgroup
// FPR/FNR panel, and pass/fail chips against the resolved bounds. Charts
// draw the PlotData blocks fetched from the service verbatim.

import type { Ctx } from '../wizard.js';
import { fmt, fmtInterval, valueSpan } from '../format.js';
import { groupedBarChart, intervalChart } from '../charts.js';
import type { MetricResult, ThresholdEntry } from '../types.js';

// guards the render-triggered plot fetch; one in flight at most
let plotsPending = false;

export function renderResults(root: HTMLElement, ctx: Ctx): void {
  const doc = root.ownerDocument;
  const session = ctx.store.get().session;
  if (!session) return;
  const inference = session.payloads.Inference;
  const thresholds = session.payloads.ThresholdSpecification?.threshold_spec.metrics ?? {};

  const heading = doc.createElement('h2');
  heading.textContent = 'Inference results';
  root.appendChild(heading);

  const form = doc.createElement('form');
  form.className = 'evaluate-form';
  const seedLabel = doc.createElement('label');
  seedLabel.append('Seed ');
  const seedInput = doc.createElement('input');
  seedInput.type = 'number';
  seedInput.name = 'seed';
  seedInput.value = String(inference?.seed ?? 42);
  seedLabel.appendChild(seedInput);
  const repLabel = doc.createElement('label');
  repLabel.append('Bootstrap replicates ');
  const repInput = doc.createElement('input');
  repInput.type = 'number';
  repInput.name = 'replicates';
  repInput.value = String(inference?.replicates ?? 1000);
  repLabel.appendChild(repInput);
  const run = doc.createElement('button');
  run.type = 'submit';
  run.textContent = inference ? 'Re-run evaluation' : 'Run evaluation';
  form.append(seedLabel, repLabel, run);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void ctx.run(async () => {
      const s = ctx.store.get();
      if (!s.session) return;
      if (inference && 'CompositeScoring' in s.session.payloads) {
        const ok = ctx.confirmAction('Re-running evaluation invalidates the verdict. Continue?');
        if (!ok) return;
      }
      await ctx.api.evaluate(s.session.session_id, {
        seed: Number(seedInput.value),
        replicates: Number(repInput.value),
      });
      await ctx.refresh();
    });
  });
  root.appendChild(form);

  if (!inference) return;

  const meta = doc.createElement('p');
  meta.className = 'inference-meta';
  meta.textContent =
    `Seed ${inference.seed}, ${inference.replicates} replicates, ` +
    `${fmt(inference.level)} interval level.`;
  root.appendChild(meta);

  const attributes = [...new Set(
    inference.fairness.filter((r) => r.attribute !== 'overall').map((r) => r.attribute),
  )];
  for (const attribute of attributes) {
    root.appendChild(
      metricTable(
        doc,
        `Fairness metrics: ${attribute}`,
        inference.fairness.filter((r) => r.attribute === attribute),
        thresholds,
      ),
    );
  }
  const overall = inference.fairness.filter((r) => r.attribute === 'overall');
  if (overall.length) {
    root.appendChild(metricTable(doc, 'Dataset-level fairness', overall, thresholds));
  }
  root.appendChild(metricTable(doc, 'Performance', inference.performance, {}));

  const subgroupsH = doc.createElement('h3');
  subgroupsH.textContent = 'Subgroup misclassification';
  root.appendChild(subgroupsH);
  const subTable = doc.createElement('table');
  subTable.className = 'subgroup-table';
  const subHeader = doc.createElement('tr');
  subHeader.innerHTML = '<th>Subgroup</th><th>N</th><th>FPR</th><th>FNR</th>';
  subTable.appendChild(subHeader);
  for (const row of inference.subgroup_rates) {
    const tr = doc.createElement('tr');
    const name = doc.createElement('td');
    name.textContent = row.subgroup;
    const n = doc.createElement('td');
    n.textContent = String(row.n);
    const fprTd = doc.createElement('td');
    fprTd.appendChild(valueSpan(doc, row.fpr, `fpr-${row.subgroup}`));
    const fnrTd = doc.createElement('td');
    fnrTd.appendChild(valueSpan(doc, row.fnr, `fnr-${row.subgroup}`));
    tr.append(name, n, fprTd, fnrTd);
    subTable.appendChild(tr);
  }
  root.appendChild(subTable);

  // charts straight from the PlotData endpoints, cached per revision so a
  // render never triggers a render (fetch loops otherwise)
  const chartBox = doc.createElement('div');
  chartBox.className = 'charts';
  root.appendChild(chartBox);
  const state = ctx.store.get();
  if (state.plotsRevision === session.revision) {
    const subgroupPlot = state.plots['subgroup-rates'];
    if (subgroupPlot) chartBox.appendChild(groupedBarChart(doc, subgroupPlot));
    const ciPlot = state.plots['uncertainty-intervals'];
    if (ciPlot) chartBox.appendChild(intervalChart(doc, ciPlot));
  } else if (!plotsPending) {
    plotsPending = true;
    void (async () => {
      const plots: Record<string, any> = {};
      try {
        plots['subgroup-rates'] = await ctx.api.plot(session.session_id, 'subgroup-rates');
        if (inference.with_ci) {
          plots['uncertainty-intervals'] = await ctx.api.plot(
            session.session_id,
            'uncertainty-intervals',
          );
        }
      } catch {
        // missing blocks simply leave their chart out
      } finally {
        plotsPending = false;
        ctx.store.set({ plots, plotsRevision: session.revision });
      }
    })();
  }

  if (inference.warnings.length) {
    const warnings = doc.createElement('ul');
    warnings.className = 'warnings';
    for (const w of inference.warnings) {
      const li = doc.createElement('li');
      li.textContent = w;
      warnings.appendChild(li);
    }
    root.appendChild(warnings);
  }

  const cont = doc.createElement('button');
  cont.className = 'continue';
  cont.textContent = 'Continue to verdict';
  cont.addEventListener('click', () => ctx.goto('CompositeScoring'));
  root.appendChild(cont);
}

function metricTable(
  doc: Document,
  title: string,
  rows: MetricResult[],
  thresholds: Record<string, ThresholdEntry>,
): HTMLElement {
  const section = doc.createElement('section');
  const h3 = doc.createElement('h3');
  h3.textContent = title;
  section.appendChild(h3);
  const table = doc.createElement('table');
  table.className = 'metric-table';
  const header = doc.createElement('tr');
  header.innerHTML = '<th>Metric</th><th>Value</th><th>CI</th><th>Bounds</th><th>Status</th>';
  table.appendChild(header);
  for (const row of rows) {
    const tr = doc.createElement('tr');
    tr.dataset.metric = row.metric;
    tr.dataset.attribute = row.attribute;
    const name = doc.createElement('td');
    name.textContent = row.metric;
    const value = doc.createElement('td');
    value.appendChild(valueSpan(doc, row.value, `metric-${row.metric}-${row.attribute}`));
    const ci = doc.createElement('td');
    ci.textContent = fmtInterval(row.ci_lower, row.ci_upper);
    const bounds = doc.createElement('td');
    const entry = thresholds[row.metric];
    bounds.textContent = entry ? fmtInterval(entry.lower, entry.upper) : 'n/a';
    const status = doc.createElement('td');
    status.appendChild(chip(doc, row, entry));
    tr.append(name, value, ci, bounds, status);
    table.appendChild(tr);
  }
  section.appendChild(table);
  return section;
}

// Presentational comparison of two server-supplied numbers; the binding
// verdict is computed server-side at the scoring stage.
function chip(doc: Document, row: MetricResult, entry?: ThresholdEntry): HTMLElement {
  const span = doc.createElement('span');
  if (!entry) {
    span.className = 'chip chip-neutral';
    span.textContent = row.defined ? 'info' : 'undefined';
    return span;
  }
  if (!row.defined || row.value === null) {
    span.className = 'chip chip-fail';
    span.textContent = 'undefined';
    return span;
  }
  const ok = entry.lower <= row.value && row.value <= entry.upper;
  span.className = ok ? 'chip chip-pass' : 'chip chip-fail';
  span.textContent = ok ? 'pass' : 'fail';
  return span;
}
