import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["test/**/*.test.ts"],
    testTimeout: 30_000,
    hookTimeout: 3_700_000, // the e2e hook may build the 200-chip table once
  },
});
