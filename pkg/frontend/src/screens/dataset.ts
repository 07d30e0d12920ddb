// Dataset screen: CSV upload with column-role mapping, then the proxy
// findings for review.

import type { Ctx } from '../wizard.js';
import { valueSpan } from '../format.js';
import type { ColumnSchema } from '../types.js';

type Role = 'ignore' | 'feature' | 'sensitive' | 'label' | 'prediction' | 'score';
const ROLES: Role[] = ['ignore', 'feature', 'sensitive', 'label', 'prediction', 'score'];

export function headerColumns(csvHead: string): string[] {
  const line = csvHead.split(/\r?\n/, 1)[0] ?? '';
  return line
    .split(',')
    .map((c) => c.trim().replace(/^"|"$/g, ''))
    .filter((c) => c.length > 0);
}

export function buildSchema(assignment: Record<string, Role>): ColumnSchema {
  const schema: ColumnSchema = {
    feature_columns: [],
    sensitive_columns: [],
    label_column: '',
    prediction_column: '',
    score_column: null,
  };
  for (const [column, role] of Object.entries(assignment)) {
    if (role === 'feature') schema.feature_columns.push(column);
    else if (role === 'sensitive') schema.sensitive_columns.push(column);
    else if (role === 'label') schema.label_column = column;
    else if (role === 'prediction') schema.prediction_column = column;
    else if (role === 'score') schema.score_column = column;
  }
  return schema;
}

export function schemaProblem(schema: ColumnSchema): string | null {
  if (!schema.label_column) return 'assign a label column';
  if (!schema.prediction_column) return 'assign a prediction column';
  if (schema.sensitive_columns.length === 0) return 'assign at least one sensitive column';
  return null;
}

export function renderDataset(root: HTMLElement, ctx: Ctx): void {
  const doc = root.ownerDocument;
  const session = ctx.store.get().session;
  if (!session) return;
  const payload = session.payloads.ProxyFeatureReview;

  const heading = doc.createElement('h2');
  heading.textContent = 'Dataset and proxy review';
  root.appendChild(heading);

  const form = doc.createElement('form');
  form.className = 'dataset-form';
  const fileLabel = doc.createElement('label');
  fileLabel.append('Predictions CSV ');
  const fileInput = doc.createElement('input');
  fileInput.type = 'file';
  fileInput.accept = '.csv,text/csv';
  fileLabel.appendChild(fileInput);
  form.appendChild(fileLabel);

  const mapping = doc.createElement('div');
  mapping.className = 'column-mapping';
  form.appendChild(mapping);

  const problem = doc.createElement('p');
  problem.className = 'schema-problem';
  form.appendChild(problem);

  const upload = doc.createElement('button');
  upload.type = 'submit';
  upload.textContent = payload ? 'Replace dataset' : 'Upload and scan';
  upload.disabled = true;
  form.appendChild(upload);

  let currentFile: File | null = null;
  const assignment: Record<string, Role> = {};

  fileInput.addEventListener('change', () => {
    const file = fileInput.files?.[0] ?? null;
    currentFile = file;
    if (!file) return;
    void file.slice(0, 64 * 1024).text().then((head) => {
      mapping.innerHTML = '';
      for (const column of headerColumns(head)) {
        assignment[column] = 'ignore';
        const row = doc.createElement('label');
        row.className = 'column-role';
        row.append(`${column} `);
        const select = doc.createElement('select');
        select.dataset.column = column;
        for (const role of ROLES) {
          const option = doc.createElement('option');
          option.value = role;
          option.textContent = role;
          select.appendChild(option);
        }
        select.addEventListener('change', () => {
          assignment[column] = select.value as Role;
          const issue = schemaProblem(buildSchema(assignment));
          problem.textContent = issue ?? '';
          upload.disabled = issue !== null;
        });
        row.appendChild(select);
        mapping.appendChild(row);
      }
      problem.textContent = schemaProblem(buildSchema(assignment)) ?? '';
      upload.disabled = true;
    });
  });

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void ctx.run(async () => {
      const s = ctx.store.get();
      if (!s.session || !currentFile) return;
      const downstream = 'Inference' in s.session.payloads;
      if (payload && downstream) {
        const ok = ctx.confirmAction(
          'Replacing the dataset invalidates the computed results and verdict. Continue?',
        );
        if (!ok) return;
      }
      const schema = buildSchema(assignment);
      await ctx.api.uploadDataset(s.session.session_id, currentFile, currentFile.name, schema);
      await ctx.refresh();
    });
  });
  root.appendChild(form);

  if (payload) {
    const info = doc.createElement('p');
    info.className = 'dataset-info';
    info.textContent =
      `${payload.n_rows} rows loaded, fingerprint ${payload.dataset_fingerprint.slice(0, 12)}. ` +
      (payload.rejected_rows.length
        ? `Rejected rows (missing outcome/sensitive cells): ${payload.rejected_rows.join(', ')}.`
        : 'No rows rejected.');
    root.appendChild(info);

    const h3 = doc.createElement('h3');
    h3.textContent = `Proxy findings (threshold ${payload.proxy_threshold})`;
    root.appendChild(h3);
    const table = doc.createElement('table');
    table.className = 'proxy-table';
    const header = doc.createElement('tr');
    header.innerHTML =
      '<th>Feature</th><th>Sensitive attribute</th><th>Association</th><th>Measure</th><th>Status</th>';
    table.appendChild(header);
    for (const finding of payload.proxy_findings) {
      const tr = doc.createElement('tr');
      const cells = [
        finding.feature,
        finding.sensitive_attribute,
      ].map((text) => {
        const td = doc.createElement('td');
        td.textContent = text;
        return td;
      });
      const assoc = doc.createElement('td');
      assoc.appendChild(
        valueSpan(doc, finding.association, `proxy-${finding.feature}-${finding.sensitive_attribute}`),
      );
      const measure = doc.createElement('td');
      measure.textContent = finding.measure;
      const status = doc.createElement('td');
      const chip = doc.createElement('span');
      chip.className = finding.flagged ? 'chip chip-fail' : 'chip chip-pass';
      chip.textContent = finding.flagged ? 'proxy' : 'clear';
      status.appendChild(chip);
      if (finding.warning) status.append(` ${finding.warning}`);
      tr.append(...cells, assoc, measure, status);
      table.appendChild(tr);
    }
    root.appendChild(table);

    const cont = doc.createElement('button');
    cont.className = 'continue';
    cont.textContent = 'Continue to results';
    cont.addEventListener('click', () => ctx.goto('Inference'));
    root.appendChild(cont);
  }
}
