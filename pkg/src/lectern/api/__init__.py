from .app import create_app, serve
from .service import ApiError, LectureService
from .settings import Settings

__all__ = ["ApiError", "LectureService", "Settings", "create_app", "serve"]
