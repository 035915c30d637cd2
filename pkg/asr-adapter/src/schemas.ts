import { z } from "zod";

/** One utterance in a tonolab manifest (JSONL, one object per line). */
export const manifestEntrySchema = z.object({
  id: z.string().min(1),
  audio_path: z.string().min(1),
  text: z.string(),
  dialect: z.string(),
  group: z.string(),
  split: z.enum(["train", "test"]),
  text_format: z.enum(["tibetan", "wylie", "auto"]).optional(),
});

export type ManifestEntry = z.infer<typeof manifestEntrySchema>;

/** One hypothesis line; `error` marks an utterance whose inference failed. */
export const hypothesisSchema = z.object({
  id: z.string().min(1),
  hyp: z.string(),
  error: z.boolean().optional(),
});

export type Hypothesis = z.infer<typeof hypothesisSchema>;

export function parseManifest(jsonl: string): ManifestEntry[] {
  const entries: ManifestEntry[] = [];
  const seen = new Set<string>();
  jsonl.split("\n").forEach((line, idx) => {
    if (!line.trim()) return;
    let raw: unknown;
    try {
      raw = JSON.parse(line);
    } catch {
      throw new Error(`manifest line ${idx + 1}: not valid JSON`);
    }
    const parsed = manifestEntrySchema.safeParse(raw);
    if (!parsed.success) {
      throw new Error(`manifest line ${idx + 1}: ${parsed.error.issues[0].message}`);
    }
    if (seen.has(parsed.data.id)) {
      throw new Error(`manifest line ${idx + 1}: duplicate id ${parsed.data.id}`);
    }
    seen.add(parsed.data.id);
    entries.push(parsed.data);
  });
  return entries;
}

export function parseHypotheses(jsonl: string): Hypothesis[] {
  return jsonl
    .split("\n")
    .filter((line) => line.trim())
    .map((line, idx) => {
      const parsed = hypothesisSchema.safeParse(JSON.parse(line));
      if (!parsed.success) {
        throw new Error(`hypothesis line ${idx + 1}: ${parsed.error.issues[0].message}`);
      }
      return parsed.data;
    });
}
