"""Тестовый пакет сервиса скручивания спина."""
