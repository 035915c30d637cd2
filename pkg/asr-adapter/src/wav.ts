import { promises as fs } from "node:fs";

export interface WavInfo {
  formatTag: number;
  channels: number;
  sampleRate: number;
  bitsPerSample: number;
  dataBytes: number;
}

/** Parse just enough of a RIFF/WAVE header to sanity-check an input file. */
export async function readWavInfo(path: string): Promise<WavInfo> {
  const buf = await fs.readFile(path);
  if (buf.length < 12 || buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error(`${path}: not a RIFF/WAVE file`);
  }
  let pos = 12;
  let fmt: WavInfo | null = null;
  let dataBytes = -1;
  while (pos + 8 <= buf.length) {
    const id = buf.toString("ascii", pos, pos + 4);
    const size = buf.readUInt32LE(pos + 4);
    if (pos + 8 + size > buf.length) {
      throw new Error(`${path}: truncated chunk ${id}`);
    }
    if (id === "fmt ") {
      fmt = {
        formatTag: buf.readUInt16LE(pos + 8),
        channels: buf.readUInt16LE(pos + 10),
        sampleRate: buf.readUInt32LE(pos + 12),
        bitsPerSample: buf.readUInt16LE(pos + 22),
        dataBytes: 0,
      };
    } else if (id === "data") {
      dataBytes = size;
    }
    pos += 8 + size + (size & 1);
  }
  if (!fmt || dataBytes < 0) {
    throw new Error(`${path}: missing fmt or data chunk`);
  }
  return { ...fmt, dataBytes };
}

export async function assertReadableAudio(path: string, expectedRate: number): Promise<void> {
  const info = await readWavInfo(path);
  if (info.sampleRate !== expectedRate) {
    throw new Error(`${path}: sample rate ${info.sampleRate}, expected ${expectedRate}`);
  }
  if (info.dataBytes === 0) {
    throw new Error(`${path}: empty data chunk`);
  }
}
