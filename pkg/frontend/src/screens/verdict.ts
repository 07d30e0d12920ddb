// Verdict screen: bias index per attribute, fairness score raw and
// clamped, per-metric verdicts, and downloads for the report formats and
// the session checkpoint.

import type { Ctx } from '../wizard.js';
import { fmtInterval, valueSpan } from '../format.js';

export function renderVerdict(root: HTMLElement, ctx: Ctx): void {
  const doc = root.ownerDocument;
  const session = ctx.store.get().session;
  if (!session) return;
  const scoring = session.payloads.CompositeScoring;

  const heading = doc.createElement('h2');
  heading.textContent = 'Verdict';
  root.appendChild(heading);

  if (!scoring) {
    const button = doc.createElement('button');
    button.className = 'compute-verdict';
    button.textContent = 'Compute verdict';
    button.addEventListener('click', () => {
      void ctx.run(async () => {
        const s = ctx.store.get();
        if (!s.session) return;
        await ctx.api.score(s.session.session_id);
        await ctx.refresh();
      });
    });
    root.appendChild(button);
    return;
  }

  const verdict = scoring.verdict;
  const badge = doc.createElement('p');
  const chip = doc.createElement('span');
  chip.className = verdict.overall_pass ? 'chip chip-pass' : 'chip chip-fail';
  chip.dataset.name = 'overall-verdict';
  chip.textContent = verdict.overall_pass ? 'PASS' : 'FAIL';
  badge.append('Overall verdict: ');
  badge.appendChild(chip);
  root.appendChild(badge);

  const scores = doc.createElement('table');
  scores.className = 'score-table';
  const fsRow = doc.createElement('tr');
  const fsLabel = doc.createElement('td');
  fsLabel.textContent = 'Fairness score (raw)';
  const fsValue = doc.createElement('td');
  fsValue.appendChild(valueSpan(doc, verdict.fairness_score, 'fairness-score'));
  fsRow.append(fsLabel, fsValue);
  scores.appendChild(fsRow);
  const fscRow = doc.createElement('tr');
  const fscLabel = doc.createElement('td');
  fscLabel.textContent = 'Fairness score (clamped to [0,1])';
  const fscValue = doc.createElement('td');
  fscValue.appendChild(valueSpan(doc, verdict.fairness_score_clamped, 'fairness-score-clamped'));
  fscRow.append(fscLabel, fscValue);
  scores.appendChild(fscRow);
  for (const [attribute, bi] of Object.entries(verdict.bias_index)) {
    const tr = doc.createElement('tr');
    const label = doc.createElement('td');
    label.textContent = `Bias index: ${attribute}`;
    const value = doc.createElement('td');
    value.appendChild(valueSpan(doc, bi, `bias-index-${attribute}`));
    tr.append(label, value);
    scores.appendChild(tr);
  }
  root.appendChild(scores);

  const biNote = doc.createElement('p');
  biNote.className = 'bi-note';
  biNote.textContent = `Bias index vector: ${verdict.bi_metrics.join(', ')} (RMS distance from the reference).`;
  root.appendChild(biNote);

  const checksH = doc.createElement('h3');
  checksH.textContent = 'Per-metric checks';
  root.appendChild(checksH);
  const table = doc.createElement('table');
  table.className = 'checks-table';
  const header = doc.createElement('tr');
  header.innerHTML =
    '<th>Metric</th><th>Attribute</th><th>Value</th><th>Bounds</th><th>Verdict</th>';
  table.appendChild(header);
  for (const check of verdict.checks) {
    const tr = doc.createElement('tr');
    const metric = doc.createElement('td');
    metric.textContent = check.metric;
    const attribute = doc.createElement('td');
    attribute.textContent = check.attribute;
    const value = doc.createElement('td');
    value.appendChild(
      valueSpan(doc, check.value, `check-${check.metric}-${check.attribute}`),
    );
    const bounds = doc.createElement('td');
    bounds.textContent = fmtInterval(check.lower, check.upper);
    const status = doc.createElement('td');
    const c = doc.createElement('span');
    c.className = check.pass ? 'chip chip-pass' : 'chip chip-fail';
    c.textContent = check.pass ? 'pass' : `fail (${check.reason})`;
    status.appendChild(c);
    tr.append(metric, attribute, value, bounds, status);
    table.appendChild(tr);
  }
  root.appendChild(table);

  if (verdict.warnings.length) {
    const warnings = doc.createElement('ul');
    warnings.className = 'warnings';
    for (const w of verdict.warnings) {
      const li = doc.createElement('li');
      li.textContent = w;
      warnings.appendChild(li);
    }
    root.appendChild(warnings);
  }

  const downloads = doc.createElement('div');
  downloads.className = 'downloads';
  const targets: [string, () => Promise<Blob>, string][] = [
    ['Report (JSON)', () => ctx.api.report(session.session_id, 'json'), 'report.json'],
    ['Report (Markdown)', () => ctx.api.report(session.session_id, 'markdown'), 'report.md'],
    ['Report (HTML)', () => ctx.api.report(session.session_id, 'html'), 'report.html'],
    ['Checkpoint', () => ctx.api.checkpoint(session.session_id), 'session.nishpaksh.json'],
  ];
  for (const [label, fetchBlob, filename] of targets) {
    const button = doc.createElement('button');
    button.className = 'download';
    button.dataset.file = filename;
    button.textContent = `Download ${label}`;
    button.addEventListener('click', () => {
      void ctx.run(async () => {
        const blob = await fetchBlob();
        ctx.saveBlob(blob, `${session.session_id}.${filename}`);
      });
    });
    downloads.appendChild(button);
  }
  root.appendChild(downloads);
}
