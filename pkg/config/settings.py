"""
Django settings for the lattice-moments project.

Generated by 'django-admin startproject' using Django 5.2.5 and trimmed down
to a command-line project: there are no URL routes, templates or static files.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import json
import os
from pathlib import Path
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
load_dotenv()
BASE_DIR = Path(__file__).resolve().parent.parent


def env_bool(name, default):
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


def env_json(name, default):
    value = os.getenv(name)
    if value is None:
        return default
    return json.loads(value)


SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "django-insecure-lattice-moments-cli-only")

DEBUG = env_bool("DJANGO_DEBUG", False)

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'rest_framework',

    #! local
    'fieldcore',
    'heights',
    'zeta',
    'bounds',
    'svpredict',
    'latticesim',
    'toolkit',
]

MIDDLEWARE = []

TOOLKIT = {
    "WORKING_DPS": int(os.getenv("LATTICE_MOMENTS_DPS", 50)),
    "EMBEDDING_TOLERANCE": float(os.getenv("LATTICE_MOMENTS_EMBEDDING_TOLERANCE", 1e-30)),
    "ZETA_TOLERANCE": float(os.getenv("LATTICE_MOMENTS_ZETA_TOLERANCE", 1e-10)),
    "ZETA_MAX_PRIME": int(os.getenv("LATTICE_MOMENTS_ZETA_MAX_PRIME", 2 ** 17)),
    "K_GRID": env_json("LATTICE_MOMENTS_K_GRID", [2, 2.5, 3, 4, 6, 8, 10.99, 16]),
    "MAX_HEIGHT": float(os.getenv("LATTICE_MOMENTS_MAX_HEIGHT", 2)),
    "MAX_SVP_DIMENSION": int(os.getenv("LATTICE_MOMENTS_MAX_SVP_DIMENSION", 48)),
    "LLL_DELTA": float(os.getenv("LATTICE_MOMENTS_LLL_DELTA", 0.99)),
    "FIGURE_CONDUCTORS": env_json("LATTICE_MOMENTS_FIGURE_CONDUCTORS", [8, 10, 12, 13, 15, 16]),
    "FIGURE_RANKS": env_json("LATTICE_MOMENTS_FIGURE_RANKS", list(range(15, 33))),
    "FIGURE_WEIL_CUTOFF": float(os.getenv("LATTICE_MOMENTS_FIGURE_WEIL_CUTOFF", 100)),
}

CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
    },
    "enumeration": {
        "BACKEND": "django.core.cache.backends.filebased.FileBasedCache",
        "LOCATION": os.getenv("LATTICE_MOMENTS_CACHE_DIR", str(BASE_DIR / ".cache" / "enumeration")),
        "TIMEOUT": None,
        "KEY_PREFIX": "lm",
        "VERSION": 1,
    },
}


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases
# only touched by `--record`

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv("LATTICE_MOMENTS_DB", str(BASE_DIR / 'db.sqlite3')),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "plain",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": os.getenv("LATTICE_MOMENTS_LOG_LEVEL", "WARNING"),
    },
}

CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", "memory://")
CELERY_RESULT_BACKEND = os.getenv("CELERY_RESULT_BACKEND", "cache+memory://")
CELERY_TASK_ALWAYS_EAGER = env_bool("CELERY_TASK_ALWAYS_EAGER", True)
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_ACCEPT_CONTENT = ["json"]
