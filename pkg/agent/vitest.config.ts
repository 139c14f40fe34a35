import { defineConfig } from "vitest/config";

// tests spawn the traced demos plus the python analysis CLI, so they are
// slower than unit scale
export default defineConfig({
  test: {
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
