"""E2E тесты для проверки API endpoints."""
