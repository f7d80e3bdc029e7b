import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    globals: true,
    environment: 'node',
    globalSetup: './tests/setup-service.ts',
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
