from django.conf import settings


def _setting(name, default):
    # Library use outside a Django project: fall back to the defaults.
    if not settings.configured:
        return default
    return getattr(settings, name, default)


class Settings:
    """
    Shadow Django's settings with a little logic
    """

    @property
    def LOG_LEVEL(self):
        return _setting("PDHGLP_LOG_LEVEL", "info")

    @property
    def LOGGER_NAME(self):
        return _setting("PDHGLP_LOGGER_NAME", "PDHG LP")

    @property
    def RUIZ_ITERATIONS(self):
        return _setting("PDHGLP_RUIZ_ITERATIONS", 10)

    @property
    def POCK_CHAMBOLLE_ALPHA(self):
        return _setting("PDHGLP_POCK_CHAMBOLLE_ALPHA", 1.0)

    @property
    def PRIMAL_WEIGHT_SMOOTHING(self):
        return _setting("PDHGLP_PRIMAL_WEIGHT_SMOOTHING", 0.5)

    @property
    def POWER_ITERATION_TOLERANCE(self):
        return _setting("PDHGLP_POWER_ITERATION_TOLERANCE", 1e-4)

    @property
    def POWER_ITERATION_LIMIT(self):
        return _setting("PDHGLP_POWER_ITERATION_LIMIT", 1000)

    @property
    def BATCH_WORKERS(self):
        return _setting("PDHGLP_BATCH_WORKERS", None)

    @property
    def RESULT_HANDLERS(self):
        return _setting("PDHGLP_RESULT_HANDLERS", [])


app_settings = Settings()
