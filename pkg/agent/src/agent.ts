// Module-load hook: every .ts file required after start() is compiled here,
// and files matching the include/exclude prefixes get the access rewrite.

import * as fs from "fs";
import * as path from "path";
import { AgentConfig, init } from "./runtime";
import { compile } from "./transform";

export type AgentOptions = Partial<AgentConfig>;

export function start(opts: AgentOptions): void {
  init(opts);
  const include = opts.include ?? [];
  const exclude = opts.exclude ?? [];

  // eslint-disable-next-line n/no-deprecated-api
  (require.extensions as NodeJS.RequireExtensions)[".ts"] = (
    mod: NodeJS.Module,
    filename: string,
  ) => {
    const source = fs.readFileSync(filename, "utf8");
    const key = moduleKey(filename);
    const js = compile(source, filename, key, shouldInstrument(key, include, exclude));
    (mod as unknown as { _compile(code: string, file: string): void })._compile(
      js,
      filename,
    );
  };
}

// Module keys are cwd-relative paths with forward slashes, so prefix lists
// stay portable.
export function moduleKey(filename: string): string {
  return path.relative(process.cwd(), filename).split(path.sep).join("/");
}

export function shouldInstrument(
  key: string,
  include: string[],
  exclude: string[],
): boolean {
  if (key.startsWith("..") || path.isAbsolute(key)) return false;
  if (exclude.some((p) => key.startsWith(p))) return false;
  if (include.length === 0) return true;
  return include.some((p) => key.startsWith(p));
}
