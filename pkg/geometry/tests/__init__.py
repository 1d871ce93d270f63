from hypothesis import HealthCheck, settings

# property suites replay the same examples on every run
settings.register_profile(
    'defgeo', derandomize=True, deadline=None, database=None, suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile('defgeo')
