#!/usr/bin/env node
import { parseArgs } from "node:util";

import { transcribe } from "./adapter.js";
import { makeBackend } from "./backends.js";

const HELP = `asr-adapter: transcribe a tonolab manifest into hypothesis JSONL

Usage:
  asr-adapter --manifest M.jsonl --out hyp.jsonl [options]

Options:
  --manifest <path>    manifest JSONL (required)
  --out <path>         hypothesis JSONL to write (required)
  --backend <name>     echo | empty | command        [default: echo]
  --model <spec>       recognizer command for --backend command
  --batch-size <n>     utterances per backend call   [default: 16]
  --device <name>      device selector, backend-specific
  --corpus-root <dir>  audio root                    [default: manifest dir]
  --tonolab <bin>      tonolab executable for the echo transliteration
`;

async function main(): Promise<number> {
  const { values } = parseArgs({
    options: {
      manifest: { type: "string" },
      out: { type: "string" },
      backend: { type: "string", default: "echo" },
      model: { type: "string" },
      "batch-size": { type: "string", default: "16" },
      device: { type: "string" },
      "corpus-root": { type: "string" },
      tonolab: { type: "string", default: "tonolab" },
      help: { type: "boolean", default: false },
    },
  });
  if (values.help) {
    process.stdout.write(HELP);
    return 0;
  }
  if (!values.manifest || !values.out) {
    process.stderr.write(HELP);
    return 2;
  }
  const result = await transcribe({
    manifestPath: values.manifest,
    outputPath: values.out,
    backend: makeBackend(values.backend!, values.model, values.tonolab),
    model: values.model,
    batchSize: Number(values["batch-size"]),
    device: values.device,
    corpusRoot: values["corpus-root"],
  });
  if (result.failed.length > 0) {
    console.error(
      `[asr-adapter] ${result.failed.length}/${result.attempted} utterances failed (flagged in output)`,
    );
  }
  console.error(`[asr-adapter] wrote ${result.attempted} hypotheses to ${values.out}`);
  return 0; // every manifest id was attempted; hard errors throw instead
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(`[asr-adapter] fatal: ${(err as Error).message}`);
    process.exit(1);
  });
