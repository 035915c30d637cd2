import { spawn } from "node:child_process";

const TIBETAN_BLOCK = /[ༀ-࿿]/;

export function hasTibetan(text: string): boolean {
  return TIBETAN_BLOCK.test(text);
}

/**
 * Convert Tibetan-script lines to Wylie by piping through the tonolab CLI,
 * the same transducer the evaluator applies to references. One process
 * handles the whole batch; line alignment is preserved.
 */
export function toWylieBatch(lines: string[], tonolabBin = "tonolab"): Promise<string[]> {
  if (lines.length === 0) return Promise.resolve([]);
  return new Promise((resolve, reject) => {
    const child = spawn(tonolabBin, ["translit", "--direction", "to-wylie"], {
      stdio: ["pipe", "pipe", "pipe"],
    });
    let out = "";
    let err = "";
    child.stdout.setEncoding("utf-8");
    child.stderr.setEncoding("utf-8");
    child.stdout.on("data", (chunk) => (out += chunk));
    child.stderr.on("data", (chunk) => (err += chunk));
    child.on("error", reject);
    child.on("close", (code) => {
      if (code !== 0) {
        reject(new Error(`tonolab translit exited ${code}: ${err.trim()}`));
        return;
      }
      const converted = out.split("\n");
      if (converted.length < lines.length) {
        reject(new Error("tonolab translit lost lines"));
        return;
      }
      resolve(converted.slice(0, lines.length));
    });
    child.stdin.write(lines.join("\n"), "utf-8");
    child.stdin.end();
  });
}
