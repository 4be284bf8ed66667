"""Integration тесты для проверки взаимодействия слоёв."""
