// Client-side mirrors of server rules, for live feedback only. The
// server remains the authority; anything accepted here is re-validated
// on submit.

import type { SessionState, Stage, ThresholdEntry } from './types.js';
import { STAGES } from './types.js';

/** Threshold override check: bounds must be ordered and contain parity. */
export function overrideProblem(
  lower: number,
  upper: number,
  parity: number,
): string | null {
  if (!Number.isFinite(lower) || !Number.isFinite(upper)) {
    return 'bounds must be numbers';
  }
  if (lower > upper) {
    return 'lower bound exceeds upper bound';
  }
  if (parity < lower || parity > upper) {
    return `bounds must contain the parity value ${parity}`;
  }
  return null;
}

export function validateOverrides(
  overrides: Record<string, [number, number]>,
  resolved: Record<string, ThresholdEntry>,
): Record<string, string> {
  const problems: Record<string, string> = {};
  for (const [metric, [lower, upper]] of Object.entries(overrides)) {
    const entry = resolved[metric];
    if (!entry) {
      problems[metric] = 'unknown metric';
      continue;
    }
    const problem = overrideProblem(lower, upper, entry.parity);
    if (problem) problems[metric] = problem;
  }
  return problems;
}

/** First stage the session has not completed (where a 409 should land the user). */
export function earliestIncompleteStage(session: SessionState): Stage {
  for (const stage of STAGES) {
    if (stage === 'Complete') break;
    if (!(stage in session.payloads)) return stage;
  }
  return 'Complete';
}

/** Stages the user may open: everything completed plus the current one. */
export function reachableStages(session: SessionState | null): Stage[] {
  if (!session) return ['SurveyIntake'];
  const currentIdx = STAGES.indexOf(session.stage);
  return STAGES.filter((_, idx) => idx <= currentIdx);
}

export function ratingsComplete(
  ratings: Record<string, number>,
  itemIds: string[],
): boolean {
  return itemIds.every((id) => {
    const r = ratings[id];
    return Number.isInteger(r) && r >= 1 && r <= 5;
  });
}
