import { execFile } from "node:child_process";
import { promisify } from "node:util";

import type { ManifestEntry } from "./schemas.js";
import { hasTibetan, toWylieBatch } from "./translit.js";

const execFileAsync = promisify(execFile);

/** A backend turns a batch of manifest entries into hypothesis strings. */
export interface Backend {
  name: string;
  transcribe(entries: ManifestEntry[], audioPaths: string[]): Promise<string[]>;
}

/**
 * Echoes the reference text as the hypothesis; Tibetan-script text is piped
 * through the tonolab transliterator so the closed loop scores zero.
 */
export function echoBackend(tonolabBin = "tonolab"): Backend {
  return {
    name: "echo",
    async transcribe(entries) {
      const texts = entries.map((e) => e.text);
      const needsTranslit = texts.some(
        (t, i) => entries[i].text_format !== "wylie" && hasTibetan(t),
      );
      if (!needsTranslit) return texts;
      const converted = await toWylieBatch(texts, tonolabBin);
      return texts.map((t, i) =>
        entries[i].text_format !== "wylie" && hasTibetan(t) ? converted[i] : t,
      );
    },
  };
}

/** Always outputs the empty string: every reference scores as deletions. */
export function emptyBackend(): Backend {
  return {
    name: "empty",
    async transcribe(entries) {
      return entries.map(() => "");
    },
  };
}

/**
 * Delegates to an external recognizer command (the `model` config field):
 * the command is invoked per utterance with the audio path appended and its
 * stdout, trimmed, becomes the hypothesis.
 */
export function commandBackend(command: string): Backend {
  const [bin, ...baseArgs] = command.split(/\s+/).filter(Boolean);
  if (!bin) throw new Error("command backend needs a non-empty command");
  return {
    name: "command",
    async transcribe(entries, audioPaths) {
      const out: string[] = [];
      for (const audioPath of audioPaths) {
        const { stdout } = await execFileAsync(bin, [...baseArgs, audioPath], {
          maxBuffer: 16 * 1024 * 1024,
        });
        out.push(stdout.trim().replace(/\s+/g, " "));
      }
      return out;
    },
  };
}

export function makeBackend(kind: string, model?: string, tonolabBin?: string): Backend {
  switch (kind) {
    case "echo":
      return echoBackend(tonolabBin);
    case "empty":
      return emptyBackend();
    case "command":
      if (!model) throw new Error("--backend command requires --model <command>");
      return commandBackend(model);
    default:
      throw new Error(`unknown backend ${kind}; expected echo, empty, or command`);
  }
}
