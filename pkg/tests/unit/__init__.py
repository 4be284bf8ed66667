"""Unit тесты для изолированного тестирования компонентов."""
