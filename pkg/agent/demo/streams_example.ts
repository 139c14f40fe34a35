// Two ways of building an int array that make the trace show different
// arrays for the same data: the staging buffer filled here is write-only in
// the log, while the library-built result array is read-only, because the
// copy in between happens inside untraced library code.

import { IntStream, listToIntArray } from "./stdlib";

// example 1: values staged into a fresh buffer, then handed to a stream
const staging = new Int32Array(4);
staging[0] = 1;
staging[1] = 11;
staging[2] = 111;
staging[3] = 1111;
const a1 = IntStream.of(staging).toArray();
let m = 0;
for (let i = 0; i < a1.length; i++) m += a1[i];

// example 2: boxed values collected into a list, unboxed by the library
const boxed = new Array<number>(4);
boxed[0] = 2;
boxed[1] = 22;
boxed[2] = 222;
boxed[3] = 2222;
const a2 = listToIntArray(boxed);
let n = 0;
for (let i = 0; i < a2.length; i++) n += a2[i];

// tracing must not change what the program computes
if (m !== 1234 || n !== 2468) {
  console.error("wrong sums:", m, n);
  process.exit(1);
}
console.log(`m=${m} n=${n}`);
