from django.apps import AppConfig


class GeometryConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'geometry'

    def ready(self):
        """
        Import signals when the app is ready
        """
        import geometry.signals  # noqa: F401
