// Known access count for checking log completeness: exactly N element
// accesses (half writes, half reads), nothing else touches an array.

const N = 10000;
const SLOTS = 250;
const ROUNDS = N / 2 / SLOTS;

const buf = new Int32Array(SLOTS);

for (let k = 0; k < N / 2; k++) buf[k % SLOTS] = k;

let acc = 0;
for (let k = 0; k < N / 2; k++) acc += buf[k % SLOTS];

// after the writes, slot j holds (ROUNDS - 1) * SLOTS + j; each slot is
// read ROUNDS times
const expected = ROUNDS * (SLOTS * (ROUNDS - 1) * SLOTS + (SLOTS * (SLOTS - 1)) / 2);
if (acc !== expected) {
  console.error("wrong sum:", acc, "expected", expected);
  process.exit(1);
}
console.log(`accesses=${N}`);
