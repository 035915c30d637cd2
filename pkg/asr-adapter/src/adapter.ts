import { promises as fs } from "node:fs";
import * as path from "node:path";

import type { Backend } from "./backends.js";
import { hypothesisSchema, parseManifest, type Hypothesis, type ManifestEntry } from "./schemas.js";
import { assertReadableAudio } from "./wav.js";

export const PIPELINE_RATE = 16000;

export interface AdapterConfig {
  manifestPath: string;
  outputPath: string;
  backend: Backend;
  /** Model identifier / checkpoint path / external command, backend-specific. */
  model?: string;
  batchSize?: number;
  device?: string;
  corpusRoot?: string; // defaults to the manifest's directory
}

export interface TranscribeResult {
  hypotheses: Hypothesis[];
  attempted: number;
  failed: string[];
}

/**
 * Run the backend over every test-split entry of the manifest and write one
 * `{"id", "hyp"}` line per utterance, in manifest order. Per-utterance
 * failures are logged, flagged, and emitted as empty hypotheses; the run
 * only counts as successful if every id was attempted.
 */
export async function transcribe(config: AdapterConfig): Promise<TranscribeResult> {
  const manifestPath = path.resolve(config.manifestPath);
  const outputPath = path.resolve(config.outputPath);
  if (manifestPath === outputPath) {
    throw new Error("output path must differ from the manifest path");
  }
  const root = config.corpusRoot ?? path.dirname(manifestPath);
  const entries = parseManifest(await fs.readFile(manifestPath, "utf-8")).filter(
    (e) => e.split === "test",
  );
  if (entries.length === 0) {
    throw new Error("manifest has no test-split entries");
  }

  const failed: string[] = [];
  const ready: ManifestEntry[] = [];
  const audioPaths: string[] = [];
  for (const entry of entries) {
    const audioPath = path.join(root, entry.audio_path);
    try {
      await assertReadableAudio(audioPath, PIPELINE_RATE);
      ready.push(entry);
      audioPaths.push(audioPath);
    } catch (err) {
      console.error(`[asr-adapter] ${entry.id}: ${(err as Error).message}`);
      failed.push(entry.id);
    }
  }

  const batchSize = config.batchSize && config.batchSize > 0 ? config.batchSize : 16;
  const byId = new Map<string, string>();
  for (let i = 0; i < ready.length; i += batchSize) {
    const batch = ready.slice(i, i + batchSize);
    const paths = audioPaths.slice(i, i + batchSize);
    try {
      const hyps = await config.backend.transcribe(batch, paths);
      if (hyps.length !== batch.length) {
        throw new Error(`backend returned ${hyps.length} hypotheses for ${batch.length} inputs`);
      }
      batch.forEach((e, j) => byId.set(e.id, hyps[j]));
    } catch (err) {
      for (const e of batch) {
        console.error(`[asr-adapter] ${e.id}: ${(err as Error).message}`);
        failed.push(e.id);
      }
    }
  }

  const hypotheses: Hypothesis[] = entries.map((e) => {
    if (byId.has(e.id)) {
      return { id: e.id, hyp: byId.get(e.id)! };
    }
    return { id: e.id, hyp: "", error: true };
  });
  for (const h of hypotheses) {
    hypothesisSchema.parse(h); // belt and braces before anything hits disk
  }

  await fs.mkdir(path.dirname(outputPath), { recursive: true });
  await fs.writeFile(
    outputPath,
    hypotheses.map((h) => JSON.stringify(h)).join("\n") + "\n",
    "utf-8",
  );
  return { hypotheses, attempted: entries.length, failed };
}
