from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='NormEvaluation',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('norm', models.CharField(help_text="Registry name, e.g. 'composite_lur'", max_length=32)),
                ('tree_digest', models.CharField(max_length=64)),
                ('weight_digest', models.CharField(max_length=64)),
                ('input_digest', models.CharField(max_length=64)),
                ('value', models.CharField(max_length=512)),
                ('error_radius', models.CharField(default='0', max_length=512)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Norm Evaluation',
                'verbose_name_plural': 'Norm Evaluations',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['norm', 'input_digest'], name='norms_norme_norm_6c1f0e_idx')],
            },
        ),
    ]
