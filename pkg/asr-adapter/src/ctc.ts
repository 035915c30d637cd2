/**
 * Greedy CTC decoding: per-frame argmax, collapse repeats, drop blanks.
 * Model-backed backends feed their logit matrices through this; the mock
 * backends never need it.
 */
export function greedyCtcDecode(
  logits: Float32Array,
  frames: number,
  vocab: string[],
  blankId = 0,
): string {
  const classes = vocab.length;
  if (logits.length < frames * classes) {
    throw new Error(`logits too short: ${logits.length} < ${frames * classes}`);
  }
  const out: string[] = [];
  let prev = -1;
  for (let t = 0; t < frames; t++) {
    let best = 0;
    let bestVal = -Infinity;
    for (let c = 0; c < classes; c++) {
      const v = logits[t * classes + c];
      if (v > bestVal) {
        bestVal = v;
        best = c;
      }
    }
    if (best !== prev && best !== blankId) {
      out.push(vocab[best]);
    }
    prev = best;
  }
  return out.join("").replace(/\|/g, " ").trim();
}
