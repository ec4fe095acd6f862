import { defineConfig } from "vitest/config";

// every test shells out to the Python CLI, and this sandbox has one core
export default defineConfig({
  test: {
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
