from django.db import models


class VerificationRun(models.Model):
    """
    A report emitted by one of the verification commands, kept for post-mortem.
    """
    COMMAND_CHOICES = [
        ('verify', 'verify'),
        ('identities', 'identities'),
        ('search', 'search'),
    ]
    VERDICT_CHOICES = [
        ('pass', 'pass'),
        ('fail', 'fail'),
    ]

    command = models.CharField(max_length=32, choices=COMMAND_CHOICES, db_index=True)
    # 64-bit unsigned seeds do not fit a signed BIGINT
    seed = models.CharField(max_length=20)
    verdict = models.CharField(max_length=8, choices=VERDICT_CHOICES, db_index=True)
    elapsed = models.FloatField(default=0.0)
    report = models.JSONField()
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = 'Verification run'
        verbose_name_plural = 'Verification runs'

    def __str__(self):
        return f"{self.command} seed={self.seed}: {self.verdict}"
