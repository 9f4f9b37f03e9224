import { defineConfig } from 'vitest/config';

export default defineConfig({
  server: {
    proxy: {
      // dev server proxies API calls to a locally running service
      '/api': 'http://127.0.0.1:8080',
    },
  },
  build: {
    outDir: 'dist',
  },
  test: {
    environment: 'jsdom',
    include: ['tests/**/*.test.ts'],
  },
});
