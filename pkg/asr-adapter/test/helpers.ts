import { promises as fs } from "node:fs";
import * as path from "node:path";

export const RATE = 16000;

/** Minimal PCM16 mono WAV writer for test fixtures. */
export async function writeSineWav(
  filePath: string,
  seconds = 0.3,
  freq = 150,
  rate = RATE,
): Promise<void> {
  const n = Math.round(seconds * rate);
  const data = Buffer.alloc(n * 2);
  for (let i = 0; i < n; i++) {
    const sample = Math.round(0.5 * 32767 * Math.sin((2 * Math.PI * freq * i) / rate));
    data.writeInt16LE(sample, i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVEfmt ", 8, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20);
  header.writeUInt16LE(1, 22);
  header.writeUInt32LE(rate, 24);
  header.writeUInt32LE(rate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  await fs.mkdir(path.dirname(filePath), { recursive: true });
  await fs.writeFile(filePath, Buffer.concat([header, data]));
}

export interface UtteranceSpec {
  id: string;
  text: string;
  dialect: string;
  group: string;
  textFormat?: "tibetan" | "wylie" | "auto";
}

/** Build a tiny corpus: WAVs plus a manifest; returns the manifest path. */
export async function makeCorpus(root: string, specs: UtteranceSpec[]): Promise<string> {
  const lines: string[] = [];
  for (const [i, spec] of specs.entries()) {
    const rel = path.join("audio", `${spec.id}.wav`);
    await writeSineWav(path.join(root, rel), 0.3, 120 + 20 * i);
    const record: Record<string, unknown> = {
      id: spec.id,
      audio_path: rel,
      text: spec.text,
      dialect: spec.dialect,
      group: spec.group,
      split: "test",
    };
    if (spec.textFormat) record.text_format = spec.textFormat;
    lines.push(JSON.stringify(record));
  }
  const manifestPath = path.join(root, "manifest.jsonl");
  await fs.writeFile(manifestPath, lines.join("\n") + "\n", "utf-8");
  return manifestPath;
}

export function parseDeltaCsv(csv: string): Record<string, Record<string, number | string>> {
  const [header, ...rows] = csv.trim().split("\n");
  const cols = header.split(",");
  const out: Record<string, Record<string, number | string>> = {};
  for (const row of rows) {
    const cells = row.split(",");
    const rec: Record<string, number | string> = {};
    cols.forEach((c, i) => {
      const v = cells[i];
      rec[c] = i >= 2 ? Number(v) : v;
    });
    out[cells[0]] = rec;
  }
  return out;
}
