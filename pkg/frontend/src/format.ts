// Display formatting. Raw values always ride along in data-value
// attributes so the screen never loses precision it received.

export function fmt(value: number | null | undefined): string {
  if (value === null || value === undefined) return 'undefined';
  if (Number.isInteger(value)) return String(value);
  return Number(value.toPrecision(4)).toString();
}

export function fmtInterval(lower: number | null, upper: number | null): string {
  if (lower === null || upper === null || lower === undefined || upper === undefined) {
    return 'n/a';
  }
  return `[${fmt(lower)}, ${fmt(upper)}]`;
}

/** A span carrying the exact value as machine-readable state. */
export function valueSpan(
  doc: Document,
  value: number | null,
  name: string,
): HTMLElement {
  const span = doc.createElement('span');
  span.dataset.name = name;
  span.dataset.value = value === null ? 'null' : String(value);
  span.textContent = fmt(value);
  return span;
}
