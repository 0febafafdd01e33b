import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the end-to-end suite boots the real service process
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
