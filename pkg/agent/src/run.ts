// Entry point: parse agent options, install the hook, run the target.
//
//   node dist/run.js [output=FILE] [cmap=FILE] [include=P1,P2]
//                    [exclude=P1,P2] [flush=N] entry.ts

import * as path from "path";
import { AgentOptions, start } from "./agent";

function usage(): never {
  console.error(
    "usage: node dist/run.js [output=FILE] [cmap=FILE] [include=P,..] " +
      "[exclude=P,..] [flush=N] entry.ts",
  );
  process.exit(1);
}

const opts: AgentOptions = { include: [], exclude: [] };
let entry: string | undefined;

for (const arg of process.argv.slice(2)) {
  const eq = arg.indexOf("=");
  if (eq < 0) {
    if (entry !== undefined) usage();
    entry = arg;
    continue;
  }
  const key = arg.slice(0, eq);
  const value = arg.slice(eq + 1);
  if (key === "output") opts.output = value;
  else if (key === "cmap") opts.cmap = value;
  else if (key === "include") opts.include!.push(...value.split(",").filter(Boolean));
  else if (key === "exclude") opts.exclude!.push(...value.split(",").filter(Boolean));
  else if (key === "flush") opts.flush = Number(value);
  else {
    console.error(`unknown option: ${key}`);
    usage();
  }
}

if (entry === undefined) usage();

try {
  start(opts);
} catch (err) {
  console.error(String(err instanceof Error ? err.message : err));
  process.exit(1);
}

require(path.resolve(entry));
