/**
 * Word-level diff for the track-changes interface.
 *
 * Tokens are words plus the whitespace runs between them, so concatenating
 * span texts reproduces inputs exactly:
 *   keep + delete spans            -> the original text
 *   keep + insert spans            -> the revised text
 *   keep + accepted-insert + rejected-delete -> the applied result
 */

export type SpanKind = 'keep' | 'delete' | 'insert';
export type Decision = 'pending' | 'accepted' | 'rejected';

export interface TrackChangeSpan {
  kind: SpanKind;
  text: string;
  /** Only delete/insert spans carry a decision. */
  decision?: Decision;
}

function tokenize(text: string): string[] {
  return text.split(/(\s+)/).filter((t) => t !== '');
}

/** Longest-common-subsequence table over token arrays. */
function lcsKeepFlags(a: string[], b: string[]): [boolean[], boolean[]] {
  const n = a.length;
  const m = b.length;
  // single flat table; passage-sized inputs only (guarded by caller)
  const table = new Uint32Array((n + 1) * (m + 1));
  const at = (i: number, j: number) => i * (m + 1) + j;
  for (let i = n - 1; i >= 0; i--) {
    for (let j = m - 1; j >= 0; j--) {
      table[at(i, j)] =
        a[i] === b[j]
          ? table[at(i + 1, j + 1)]! + 1
          : Math.max(table[at(i + 1, j)]!, table[at(i, j + 1)]!);
    }
  }
  const keepA = new Array<boolean>(n).fill(false);
  const keepB = new Array<boolean>(m).fill(false);
  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    if (a[i] === b[j]) {
      keepA[i] = true;
      keepB[j] = true;
      i++;
      j++;
    } else if (table[at(i + 1, j)]! >= table[at(i, j + 1)]!) {
      i++;
    } else {
      j++;
    }
  }
  return [keepA, keepB];
}

function pushSpan(spans: TrackChangeSpan[], kind: SpanKind, text: string): void {
  if (!text) return;
  const last = spans[spans.length - 1];
  if (last && last.kind === kind) {
    last.text += text;
    return;
  }
  spans.push(kind === 'keep' ? { kind, text } : { kind, text, decision: 'pending' });
}

/** Diff original vs revised into decision spans (word granularity). */
export function diffWords(original: string, revised: string): TrackChangeSpan[] {
  if (original === revised) {
    return original ? [{ kind: 'keep', text: original }] : [];
  }
  const a = tokenize(original);
  const b = tokenize(revised);

  // trim the common prefix/suffix so the LCS table stays passage-sized
  let start = 0;
  while (start < a.length && start < b.length && a[start] === b[start]) start++;
  let endA = a.length;
  let endB = b.length;
  while (endA > start && endB > start && a[endA - 1] === b[endB - 1]) {
    endA--;
    endB--;
  }

  const spans: TrackChangeSpan[] = [];
  pushSpan(spans, 'keep', a.slice(0, start).join(''));

  const middleA = a.slice(start, endA);
  const middleB = b.slice(start, endB);
  const [keepA, keepB] = lcsKeepFlags(middleA, middleB);
  let i = 0;
  let j = 0;
  while (i < middleA.length || j < middleB.length) {
    const before = i + j;
    let deleted = '';
    while (i < middleA.length && !keepA[i]) deleted += middleA[i++];
    pushSpan(spans, 'delete', deleted);
    let inserted = '';
    while (j < middleB.length && !keepB[j]) inserted += middleB[j++];
    pushSpan(spans, 'insert', inserted);
    // matched tokens advance in lockstep; stop at the next insert/delete run
    let kept = '';
    while (i < middleA.length && keepA[i] && j < middleB.length && keepB[j]) {
      kept += middleA[i++];
      j++;
    }
    pushSpan(spans, 'keep', kept);
    if (i + j === before) {
      throw new Error('diff cursors stalled; keep flags are inconsistent');
    }
  }

  pushSpan(spans, 'keep', a.slice(endA).join(''));
  return spans;
}

/** Original text: keep + delete spans. */
export function originalText(spans: TrackChangeSpan[]): string {
  return spans
    .filter((s) => s.kind === 'keep' || s.kind === 'delete')
    .map((s) => s.text)
    .join('');
}

/** Revised text: keep + insert spans. */
export function revisedText(spans: TrackChangeSpan[]): string {
  return spans
    .filter((s) => s.kind === 'keep' || s.kind === 'insert')
    .map((s) => s.text)
    .join('');
}

/**
 * Applied result under the current decisions. Pending behaves like rejected,
 * so applying an untouched diff reproduces the original.
 */
export function resolveSpans(spans: TrackChangeSpan[]): string {
  let out = '';
  for (const span of spans) {
    if (span.kind === 'keep') out += span.text;
    else if (span.kind === 'insert' && span.decision === 'accepted') out += span.text;
    else if (span.kind === 'delete' && span.decision !== 'accepted') out += span.text;
  }
  return out;
}

export function decideAll(spans: TrackChangeSpan[], decision: Decision): TrackChangeSpan[] {
  return spans.map((s) => (s.kind === 'keep' ? s : { ...s, decision }));
}

export function decisionSpanCount(spans: TrackChangeSpan[]): number {
  return spans.filter((s) => s.kind !== 'keep').length;
}
