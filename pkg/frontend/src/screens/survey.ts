// Survey wizard: the question bank grouped by domain, rated 1..5, with a
// collapsible explainer per item. After submit the risk profile is shown
// before the user moves on.

import type { Ctx } from '../wizard.js';
import { valueSpan } from '../format.js';
import { ratingsComplete } from '../validate.js';

const RATING_LABELS = ['very low', 'low', 'medium', 'high', 'very high'];

export function renderSurvey(root: HTMLElement, ctx: Ctx): void {
  const doc = root.ownerDocument;
  const state = ctx.store.get();
  const bank = state.questionBank;
  const session = state.session;
  const completed = session?.payloads.SurveyIntake;

  const heading = doc.createElement('h2');
  heading.textContent = 'Lifecycle risk survey';
  root.appendChild(heading);

  const intro = doc.createElement('p');
  intro.textContent =
    'Rate each lifecycle risk from 1 (very low) to 5 (very high). ' +
    'Scores aggregate per domain and drive the metric thresholds later on.';
  root.appendChild(intro);

  const form = doc.createElement('form');
  form.className = 'survey-form';
  const domains = [...new Set(bank.map((i) => i.domain))];
  for (const domain of domains) {
    const section = doc.createElement('fieldset');
    const legend = doc.createElement('legend');
    legend.textContent = domain;
    section.appendChild(legend);
    for (const item of bank.filter((i) => i.domain === domain)) {
      const row = doc.createElement('div');
      row.className = 'survey-item';
      row.dataset.itemId = item.id;

      const explainer = doc.createElement('details');
      const summary = doc.createElement('summary');
      summary.textContent = item.text;
      explainer.appendChild(summary);
      const hint = doc.createElement('p');
      hint.className = 'explainer';
      hint.textContent =
        `${item.factor === 'process' ? 'Process' : 'Technical'} factor in the ` +
        `${domain} domain. Pick the level that best matches the system today; ` +
        'higher ratings mean higher bias risk and stricter thresholds.';
      explainer.appendChild(hint);
      row.appendChild(explainer);

      const scale = doc.createElement('div');
      scale.className = 'scale';
      for (let rating = 1; rating <= 5; rating++) {
        const label = doc.createElement('label');
        const input = doc.createElement('input');
        input.type = 'radio';
        input.name = item.id;
        input.value = String(rating);
        const current = ctx.store.get().pendingRatings[item.id];
        if (current === rating) input.checked = true;
        // edit buffer mutates silently; a full re-render would lose focus
        input.addEventListener('change', () => {
          ctx.store.get().pendingRatings[item.id] = rating;
          submit.disabled = !ratingsComplete(
            ctx.store.get().pendingRatings,
            bank.map((i) => i.id),
          );
        });
        label.appendChild(input);
        label.append(` ${rating} (${RATING_LABELS[rating - 1]})`);
        scale.appendChild(label);
      }
      row.appendChild(scale);
      section.appendChild(row);
    }
    form.appendChild(section);
  }

  const submit = doc.createElement('button');
  submit.type = 'submit';
  submit.textContent = completed ? 'Amend survey' : 'Submit survey';
  submit.disabled = !ratingsComplete(
    state.pendingRatings,
    bank.map((i) => i.id),
  );
  form.appendChild(submit);

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void ctx.run(async () => {
      const s = ctx.store.get();
      if (!s.session) return;
      const downstream = Object.keys(s.session.payloads).length > 1;
      if (completed && downstream) {
        const ok = ctx.confirmAction(
          'Amending the survey invalidates thresholds, dataset review, results, ' +
            'and the verdict. The audit rewinds to threshold specification. Continue?',
        );
        if (!ok) return;
      }
      const responses = Object.entries(s.pendingRatings).map(([item_id, rating]) => ({
        item_id,
        rating,
      }));
      await ctx.api.submitSurvey(s.session.session_id, responses);
      await ctx.refresh();
    });
  });
  root.appendChild(form);

  if (completed) {
    root.appendChild(renderRiskProfile(doc, completed.risk_profile));
    const cont = doc.createElement('button');
    cont.className = 'continue';
    cont.textContent = 'Continue to thresholds';
    cont.addEventListener('click', () => ctx.goto('ThresholdSpecification'));
    root.appendChild(cont);
  }
}

function renderRiskProfile(doc: Document, profile: any): HTMLElement {
  const panel = doc.createElement('section');
  panel.className = 'risk-profile';
  const h = doc.createElement('h3');
  h.textContent = 'Risk profile';
  panel.appendChild(h);

  const badge = doc.createElement('span');
  badge.className = `badge badge-${String(profile.category).toLowerCase()}`;
  badge.dataset.name = 'risk-category';
  badge.textContent = profile.category;
  panel.appendChild(badge);

  const table = doc.createElement('table');
  const header = doc.createElement('tr');
  header.innerHTML = '<th>Domain</th><th>Score</th>';
  table.appendChild(header);
  for (const [domain, score] of Object.entries(profile.domain_scores)) {
    const tr = doc.createElement('tr');
    const td1 = doc.createElement('td');
    td1.textContent = domain;
    const td2 = doc.createElement('td');
    td2.appendChild(valueSpan(doc, score as number, `domain-${domain}`));
    tr.append(td1, td2);
    table.appendChild(tr);
  }
  for (const [label, key] of [
    ['Process sub-score', 'process_score'],
    ['Technical sub-score', 'technical_score'],
    ['Composite', 'composite'],
  ] as const) {
    const tr = doc.createElement('tr');
    const td1 = doc.createElement('td');
    td1.textContent = label;
    const td2 = doc.createElement('td');
    td2.appendChild(valueSpan(doc, profile[key], key));
    tr.append(td1, td2);
    table.appendChild(tr);
  }
  panel.appendChild(table);
  return panel;
}
