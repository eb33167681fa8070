from rest_framework import serializers

from .boundary import CaseTag, PIntervalKind
from .exceptions import HlawkaError
from .gram import GramParams, ScaleLaw, VectorTriple
from .inequalities import InequalityId
from .models import VerificationRun

INEQUALITY_CHOICES = [inequality_id.value for inequality_id in InequalityId]


class VectorTripleSerializer(serializers.Serializer):
    x = serializers.ListField(child=serializers.FloatField(), min_length=1)
    y = serializers.ListField(child=serializers.FloatField(), min_length=1)
    z = serializers.ListField(child=serializers.FloatField(), min_length=1)

    def validate(self, attrs):
        try:
            VectorTriple(attrs['x'], attrs['y'], attrs['z'])
        except HlawkaError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs

    def create(self, validated_data):
        return VectorTriple(**validated_data)


class GramParamsSerializer(serializers.Serializer):
    nsq_x = serializers.FloatField(min_value=0.0)
    nsq_y = serializers.FloatField(min_value=0.0)
    nsq_z = serializers.FloatField(min_value=0.0)
    p = serializers.FloatField()
    q = serializers.FloatField()
    r = serializers.FloatField()

    def validate(self, attrs):
        try:
            GramParams(**attrs)
        except HlawkaError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs

    def create(self, validated_data):
        return GramParams(**validated_data)


class PsdReportSerializer(serializers.Serializer):
    minors_2x2 = serializers.ListField(child=serializers.FloatField())
    det = serializers.FloatField()
    is_psd = serializers.BooleanField()
    rank_estimate = serializers.IntegerField(min_value=0, max_value=3)
    eigenvalues = serializers.ListField(child=serializers.FloatField())


class SlackReportSerializer(serializers.Serializer):
    inequality_id = serializers.ChoiceField(choices=INEQUALITY_CHOICES)
    lhs = serializers.FloatField()
    rhs = serializers.FloatField()
    slack = serializers.FloatField()
    is_equality = serializers.BooleanField()


class ReducedFormsSerializer(serializers.Serializer):
    L_bold = serializers.FloatField()
    R_bold = serializers.FloatField()
    xi = serializers.FloatField()


class DependenceWitnessSerializer(serializers.Serializer):
    tag = serializers.ChoiceField(choices=[tag.value for tag in CaseTag], source='case.tag')
    mu = serializers.FloatField(source='case.mu')
    dependence_residual = serializers.FloatField()
    condition_residual = serializers.FloatField()

    def get_fields(self):
        # "lambda" is a keyword, so it cannot be declared as a class attribute
        fields = super().get_fields()
        fields['lambda'] = serializers.FloatField(source='case.lam')
        return fields


class PIntervalSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=[kind.value for kind in PIntervalKind])
    lo = serializers.FloatField(allow_null=True)
    hi = serializers.FloatField(allow_null=True)


class RestartOutcomeSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    value = serializers.FloatField()
    det = serializers.FloatField()
    iterations = serializers.IntegerField()
    converged = serializers.BooleanField()


class SearchResultSerializer(serializers.Serializer):
    min_value = serializers.FloatField()
    argmin_factor = serializers.SerializerMethodField()
    argmin_gram = GramParamsSerializer()
    det_at_argmin = serializers.FloatField()
    iterations = serializers.IntegerField()
    converged = serializers.BooleanField()
    restarts = RestartOutcomeSerializer(many=True)
    stationary_points = RestartOutcomeSerializer(many=True)

    def get_argmin_factor(self, obj):
        """Row-major 9-element list."""
        return [float(value) for value in obj.argmin_factor.ravel()]


class EqualityPointSerializer(serializers.Serializer):
    gram = GramParamsSerializer()
    report = SlackReportSerializer()
    witnesses = DependenceWitnessSerializer(many=True)
    restart = serializers.IntegerField()


class GridOracleSerializer(serializers.Serializer):
    resolution = serializers.IntegerField()
    admissible_points = serializers.IntegerField()
    min_value = serializers.FloatField()
    argmin_gram = GramParamsSerializer()


class SuiteConfigSerializer(serializers.Serializer):
    """Config file schema for the verify command; every key is optional."""

    trials = serializers.IntegerField(min_value=1, required=False)
    dimension = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1, required=False)
    tol = serializers.FloatField(required=False)
    strategies = serializers.ListField(child=serializers.CharField(), min_length=1, required=False)
    inequalities = serializers.ListField(
        child=serializers.ChoiceField(choices=INEQUALITY_CHOICES), min_length=1, required=False
    )
    scale_law = serializers.ChoiceField(choices=[law.value for law in ScaleLaw], required=False)
    chunk_size = serializers.IntegerField(min_value=1, required=False)

    def validate_tol(self, value):
        if value <= 0:
            raise serializers.ValidationError("tol must be positive")
        return value


class InequalityStatsSerializer(serializers.Serializer):
    count = serializers.IntegerField()
    min_slack = serializers.FloatField(allow_null=True)
    equality_count = serializers.IntegerField()
    worst_input = serializers.SerializerMethodField()

    def get_worst_input(self, obj):
        if obj.worst_gram is None:
            return None
        worst = {'gram': GramParamsSerializer(obj.worst_gram).data}
        if obj.worst_vectors is not None:
            worst['vectors'] = VectorTripleSerializer(obj.worst_vectors).data
        return worst


class SuiteReportSerializer(serializers.Serializer):
    seed = serializers.IntegerField()
    tol = serializers.FloatField()
    trials = serializers.IntegerField()
    strategies = serializers.ListField(child=serializers.CharField())
    elapsed = serializers.FloatField()
    verdict = serializers.CharField()
    inequalities = serializers.SerializerMethodField()

    def get_inequalities(self, obj):
        return {
            str(inequality_id): InequalityStatsSerializer(stats).data
            for inequality_id, stats in obj.stats.items()
        }


class IdentityRowSerializer(serializers.Serializer):
    identity = serializers.CharField()
    count = serializers.IntegerField()
    max_residual = serializers.FloatField()
    threshold = serializers.FloatField()
    passed = serializers.BooleanField()


class IdentityReportSerializer(serializers.Serializer):
    seed = serializers.IntegerField()
    count = serializers.IntegerField()
    elapsed = serializers.FloatField()
    verdict = serializers.CharField()
    rows = IdentityRowSerializer(many=True)


class WitnessReportSerializer(serializers.Serializer):
    name = serializers.CharField()
    triple = VectorTripleSerializer()
    gram = GramParamsSerializer()
    reports = SlackReportSerializer(many=True)
    substituted_R = serializers.FloatField()


class ClassificationSerializer(serializers.Serializer):
    triple = VectorTripleSerializer()
    gram = GramParamsSerializer()
    psd = PsdReportSerializer()
    reduced = ReducedFormsSerializer()
    p_interval = PIntervalSerializer()
    strong_hlawka = SlackReportSerializer()
    witnesses = DependenceWitnessSerializer(many=True)


class VerificationRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = VerificationRun
        fields = ['id', 'command', 'seed', 'verdict', 'elapsed', 'report', 'created_at']
