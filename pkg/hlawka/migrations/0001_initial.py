from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('verify', 'verify'), ('identities', 'identities'), ('search', 'search')], db_index=True, max_length=32)),
                ('seed', models.CharField(max_length=20)),
                ('verdict', models.CharField(choices=[('pass', 'pass'), ('fail', 'fail')], db_index=True, max_length=8)),
                ('elapsed', models.FloatField(default=0.0)),
                ('report', models.JSONField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Verification run',
                'verbose_name_plural': 'Verification runs',
                'ordering': ['-created_at'],
            },
        ),
    ]
