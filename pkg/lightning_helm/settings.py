"""
Django settings.

The project has no database, URLs or templates: Django provides the command-line surface
(management commands), settings and the test runner for the ``scattering`` app.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

import json
import logging
import os
from pathlib import Path

import logfire
import sentry_sdk
from dotenv import load_dotenv

from lightning_helm.utils import strtobool

logger = logging.getLogger(__name__)

# Build paths inside the project like this: BASE_DIR / "subdir".
BASE_DIR = Path(__file__).resolve().parent.parent

env_file = os.path.join(BASE_DIR, ".env")
if os.path.exists(env_file):
    load_dotenv(env_file)

SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "lightning-helm-no-secrets-needed")

DEBUG = bool(strtobool(os.getenv("DEBUG", "false")))

ENV = os.getenv("ENV", "production")

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

LOG_FILE = os.getenv("LOG_FILE")

VERSION = os.getenv("VERSION", "dev")

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    "scattering.apps.ScatteringConfig",
]

DATABASES = {}

USE_TZ = True

# Logging
# https://docs.djangoproject.com/en/5.1/topics/logging/
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": LOG_LEVEL,
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "scattering": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}

if LOG_FILE:
    LOGGING["handlers"]["file"] = {
        "level": "DEBUG" if DEBUG else LOG_LEVEL,
        "class": "logging.handlers.RotatingFileHandler",
        "filename": LOG_FILE,
        "formatter": "verbose",
        "maxBytes": 10 * 1024 * 1024,
        "backupCount": 5,
    }
    for name in ("django", "scattering"):
        LOGGING["loggers"][name]["handlers"].append("file")

if DEBUG:
    LOGGING["loggers"]["scattering"]["level"] = "DEBUG"


####################
# SOLVER SETTINGS  #
####################

# Points evaluated per basis-matrix block when sampling fields.
LIGHTNING_EVALUATION_CHUNK = int(os.getenv("LIGHTNING_EVALUATION_CHUNK", "4096"))

# Thread pool width for independent solves in sweeps and convergence studies.
LIGHTNING_SWEEP_WORKERS = int(os.getenv("LIGHTNING_SWEEP_WORKERS", "1"))

# Test points per half-edge for the boundary error printed after `solve`.
LIGHTNING_PROFILE_POINTS = int(os.getenv("LIGHTNING_PROFILE_POINTS", "64"))


####################
# PACKAGE SETTINGS #
####################

LOG_IGNORE_PATTERNS = json.loads(os.getenv("LOG_IGNORE_PATTERNS", "[]"))

SENTRY_ENABLED = strtobool(os.getenv("SENTRY_ENABLED", "false"))
if SENTRY_ENABLED:
    sentry_sdk.init(
        dsn=os.getenv("SENTRY_DSN"),
        environment=ENV,
        traces_sample_rate=1.0,
        release=VERSION,
        _experiments={
            "enable_logs": True,
            "before_send_log": lambda log, hint=None: None if any(s in log["body"] for s in LOG_IGNORE_PATTERNS) else log,
        },
    )

# Spans around solves, sweep rows and grid sampling; nothing is sent without a token.
logfire.configure(
    token=os.getenv("LOGFIRE_TOKEN"),
    send_to_logfire="if-token-present",
    service_name="lightning-helm",
    service_version=VERSION,
    environment=ENV,
    console=False,
    scrubbing=False,
)
