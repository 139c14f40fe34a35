// Logging runtime for the access agent. Instrumented modules call ld/st in
// place of element reads and writes; everything here stays out of the traced
// set, so none of these helpers show up in the log themselves.

import * as fs from "fs";

export interface AgentConfig {
  output: string;
  cmap: string | null;
  include: string[];
  exclude: string[];
  flush: number;
}

const config: AgentConfig = {
  output: "trace.atrace",
  cmap: null,
  include: [],
  exclude: [],
  flush: 4096,
};

// Application code runs on one thread in this runtime.
const THREAD_ID = 1;

let buffer: string[] = [];
let installed = false;

export function init(opts: Partial<AgentConfig>): void {
  Object.assign(config, opts);
  if (!Number.isInteger(config.flush) || config.flush < 1) {
    throw new Error(`flush interval must be a positive integer, got ${config.flush}`);
  }
  fs.writeFileSync(config.output, "");
  if (!installed) {
    installed = true;
    process.on("exit", () => {
      flush();
      writeClassMap();
    });
  }
}

export function currentConfig(): AgentConfig {
  return config;
}

// --- array identity -------------------------------------------------------

const registry = new WeakMap<object, string>();
let nextSeq = 1;

// Multiplicative hash of an allocation counter: bijective on 32 bits, and
// deliberately shaped like the identity hash codes a managed runtime prints.
function token(seq: number): string {
  return (Math.imul(seq, 0x9e3779b1) >>> 0).toString(16);
}

const VIEW_DESCRIPTORS: Record<string, string> = {
  Int8Array: "[B",
  Uint8Array: "[B",
  Uint8ClampedArray: "[B",
  Int16Array: "[S",
  Uint16Array: "[C",
  Int32Array: "[I",
  Uint32Array: "[I",
  Float32Array: "[F",
  Float64Array: "[D",
  BigInt64Array: "[J",
  BigUint64Array: "[J",
};

// Plain arrays carry boxed values, like collections do; the first value seen
// decides the element type and the descriptor is frozen from then on.
function boxedDescriptor(sample: unknown): string {
  switch (typeof sample) {
    case "number":
      return "[Ljava.lang.Integer;";
    case "bigint":
      return "[Ljava.lang.Long;";
    case "string":
      return "[Ljava.lang.String;";
    case "boolean":
      return "[Ljava.lang.Boolean;";
    default:
      return Array.isArray(sample) ? "[[Ljava.lang.Object;" : "[Ljava.lang.Object;";
  }
}

function descriptorOf(obj: object, sample: unknown): string {
  if (Array.isArray(obj)) return boxedDescriptor(sample);
  const tag = Object.prototype.toString.call(obj).slice(8, -1);
  return VIEW_DESCRIPTORS[tag] ?? "[Ljava.lang.Object;";
}

function idOf(obj: object, sample: unknown): string {
  let id = registry.get(obj);
  if (id === undefined) {
    id = `${descriptorOf(obj, sample)}@${token(nextSeq++)}`;
    registry.set(obj, id);
  }
  return id;
}

// --- class map ------------------------------------------------------------

const classNames = new Map<number, string>();

export function registerClass(name: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < name.length; i++) {
    h ^= name.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  if (!classNames.has(h)) classNames.set(h, name);
  return h;
}

export function writeClassMap(): void {
  if (!config.cmap) return;
  const lines = [...classNames.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([h, name]) => `${h.toString(16).toUpperCase()} ${name}`);
  fs.writeFileSync(config.cmap, lines.length ? lines.join("\n") + "\n" : "");
}

// --- access hooks ---------------------------------------------------------

// Indexed containers we trace: plain arrays and the numeric views. DataView
// has no elements; string/negative/fractional subscripts are property
// accesses, not element accesses, and pass through unlogged.
function traceable(obj: unknown): obj is object {
  return (
    Array.isArray(obj) ||
    (ArrayBuffer.isView(obj) && !(obj instanceof DataView))
  );
}

function record(
  obj: object,
  mode: "r" | "w",
  idx: number,
  line: number,
  klass: number,
  sample: unknown,
): void {
  const len = (obj as { length: number }).length;
  buffer.push(
    `${idOf(obj, sample)} ${mode} ${idx} ${len} ${THREAD_ID} ${line} ${klass
      .toString(16)
      .toUpperCase()}`,
  );
  if (buffer.length >= config.flush) flush();
}

export function ld(obj: any, idx: any, line: number, klass: number): any {
  const value = obj[idx];
  if (traceable(obj) && Number.isInteger(idx) && idx >= 0) {
    record(obj, "r", idx, line, klass, value);
  }
  return value;
}

export function st(obj: any, idx: any, val: any, line: number, klass: number): any {
  // length is sampled before the store so growth shows up as an
  // out-of-bounds index on the old length
  if (traceable(obj) && Number.isInteger(idx) && idx >= 0) {
    record(obj, "w", idx, line, klass, val);
  }
  obj[idx] = val;
  return val;
}

export function flush(): void {
  if (buffer.length === 0) return;
  fs.appendFileSync(config.output, buffer.join("\n") + "\n");
  buffer = [];
}
