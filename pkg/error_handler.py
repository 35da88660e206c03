import logging

from core.exceptions import ConfigError
from core.models import CheckRecord, Status


class ErrorHandler:
    """
    Central handler for exceptions escaping a check: logs the traceback and
    turns the failure into an "error" record so the suite keeps running.
    """

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.handled: list[str] = []

    # ──────────────────────────────────────────────────────────────
    def handle(self, exc: Exception, context_name: str = "check", mandatory: bool = True) -> CheckRecord:
        # 1) log full traceback
        self.logger.error(f"[{context_name}] {exc!r}", exc_info=True)
        self.handled.append(context_name)

        # 2) the failure becomes data in the report
        return CheckRecord(
            name=context_name,
            status=Status.ERROR,
            notes=[f"{type(exc).__name__}: {exc}"],
            mandatory=mandatory,
        )

    # ──────────────────────────────────────────────────────────────
    @staticmethod
    def exit_code_for(exc: BaseException | None) -> int:
        """0 for no error, 2 for usage/config errors, 1 for everything else."""
        if exc is None:
            return 0
        if isinstance(exc, ConfigError):
            return 2
        return 1

    # ──────────────────────────────────────────────────────────────
    def guard(self, name: str, check, *args, mandatory: bool = True, **kwargs) -> CheckRecord:
        """Run one check; an escaping exception becomes an error record."""
        try:
            record = check(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - every failure is reported
            return self.handle(exc, name, mandatory)
        self.logger.info(
            "%-40s %-5s max residual %s",
            record.name,
            record.status.value,
            "-" if record.max_residual is None else f"{record.max_residual:.3e}",
        )
        return record
