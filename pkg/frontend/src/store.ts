// Minimal observable store. The session snapshot from the API is the
// source of truth; the rest is pending edit buffers per stage.

import type { PlotData, SessionState, Stage, SurveyItem } from './types.js';

export interface ViewState {
  session: SessionState | null;
  questionBank: SurveyItem[];
  // which screen the user is looking at; never ahead of session.stage
  activeStage: Stage;
  pendingRatings: Record<string, number>;
  pendingOverrides: Record<string, [number, number]>;
  pendingSector: string;
  pendingModelVersion: string;
  // plot blocks fetched for the session revision in plotsRevision
  plots: Record<string, PlotData>;
  plotsRevision: number | null;
  error: string | null;
  busy: boolean;
}

export function initialState(): ViewState {
  return {
    session: null,
    questionBank: [],
    activeStage: 'SurveyIntake',
    pendingRatings: {},
    pendingOverrides: {},
    pendingSector: 'generic',
    pendingModelVersion: '',
    plots: {},
    plotsRevision: null,
    error: null,
    busy: false,
  };
}

type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState;
  private listeners: Listener[] = [];

  constructor(state: ViewState = initialState()) {
    this.state = state;
  }

  get(): ViewState {
    return this.state;
  }

  set(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }
}
