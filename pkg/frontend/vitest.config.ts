import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // The e2e suite spawns the Python service; give it room.
    testTimeout: 30000,
    hookTimeout: 45000,
    fileParallelism: false,
  },
});
