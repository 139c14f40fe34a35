import { spawnSync, SpawnSyncReturns } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { expect } from "vitest";

export const agentRoot = path.resolve(__dirname, "..");

export function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "agent-test-"));
}

export function runAgent(entry: string, options: string[]): SpawnSyncReturns<string> {
  const result = spawnSync(
    process.execPath,
    ["dist/run.js", ...options, entry],
    { cwd: agentRoot, encoding: "utf8" },
  );
  expect(result.error).toBeUndefined();
  expect(result.stderr).toBe("");
  expect(result.status).toBe(0);
  return result;
}

export function runAnalysis(args: string[]): SpawnSyncReturns<string> {
  const result = spawnSync("python3", ["-m", "arraytrace", "-q", ...args], {
    cwd: agentRoot,
    encoding: "utf8",
  });
  expect(result.error).toBeUndefined();
  expect(result.status).toBe(0);
  return result;
}

export interface Block {
  id: string;
  descriptor: string;
  length: number;
  modes: Set<string>;
  indices: Set<number>;
}

// minimal reader for the grouped format: header "<id> <length> <n>" then
// n records "<mode> <index> <thread> <line> <classHash>"
export function readGrouped(file: string): Block[] {
  const lines = fs.readFileSync(file, "utf8").split("\n").filter((l) => l !== "");
  const blocks: Block[] = [];
  let i = 0;
  while (i < lines.length) {
    const header = lines[i].split(" ");
    expect(header).toHaveLength(3);
    const id = header[0];
    const n = Number(header[2]);
    const block: Block = {
      id,
      descriptor: id.slice(0, id.indexOf("@")),
      length: Number(header[1]),
      modes: new Set(),
      indices: new Set(),
    };
    for (let k = 0; k < n; k++) {
      const rec = lines[i + 1 + k].split(" ");
      expect(rec).toHaveLength(5);
      block.modes.add(rec[0]);
      block.indices.add(Number(rec[1]));
    }
    blocks.push(block);
    i += 1 + n;
  }
  return blocks;
}
