// Collection helpers standing in for a platform library. The agent is run
// with this module excluded, so the copies below never reach the log, the
// same way a managed runtime's standard library goes untraced.

export class IntStream {
  private buf: Int32Array;

  private constructor(buf: Int32Array) {
    this.buf = buf;
  }

  static of(values: Int32Array): IntStream {
    const copy = new Int32Array(values.length);
    for (let i = 0; i < values.length; i++) copy[i] = values[i];
    return new IntStream(copy);
  }

  toArray(): Int32Array {
    const out = new Int32Array(this.buf.length);
    for (let i = 0; i < this.buf.length; i++) out[i] = this.buf[i];
    return out;
  }
}

// list.stream().mapToInt(unbox).toArray() in one call
export function listToIntArray(list: Array<number>): Int32Array {
  const out = new Int32Array(list.length);
  for (let i = 0; i < list.length; i++) out[i] = list[i];
  return out;
}
