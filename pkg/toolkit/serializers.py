from django.conf import settings
from mpmath import mp
from rest_framework import serializers

from heights.constants import MODES as CONSTANTS_MODES


class NumberStringField(serializers.CharField):
    """Finite real given as a string or a number; kept as its decimal string."""

    def __init__(self, *, min_value=None, strict_min=False, **kwargs):
        self.lower_bound = min_value
        self.strict_min = strict_min
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, bool) or not isinstance(data, (str, int, float)):
            self.fail("invalid")
        text = str(data).strip()
        try:
            value = mp.mpf(text)
        except (TypeError, ValueError):
            raise serializers.ValidationError(f"{text!r} is not a number")
        if not mp.isfinite(value):
            raise serializers.ValidationError("value must be finite")
        if self.lower_bound is not None:
            bound = mp.mpf(self.lower_bound)
            if value < bound or (self.strict_min and value == bound):
                relation = ">" if self.strict_min else ">="
                raise serializers.ValidationError(f"must be {relation} {self.lower_bound}")
        return text


class RunConfigSerializer(serializers.Serializer):
    """Base config: rejects keys it does not declare."""
    m = serializers.IntegerField(min_value=1)

    def validate(self, attrs):
        unknown = sorted(set(self.initial_data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: "unknown key" for key in unknown})
        return attrs


class BoundConfigSerializer(RunConfigSerializer):
    t = serializers.IntegerField(min_value=2)
    mode = serializers.ChoiceField(choices=["asymptotic", "explicit"], default="explicit")
    h0 = NumberStringField(allow_null=True, default=None)
    k_grid = serializers.ListField(child=NumberStringField(min_value=2), required=False, allow_empty=False)
    A = NumberStringField(allow_null=True, default=None, min_value=0, strict_min=True)
    constants_mode = serializers.ChoiceField(choices=CONSTANTS_MODES, default="uniform_cyclotomic")
    c = NumberStringField(required=False)
    c_o = NumberStringField(required=False)
    c_S = NumberStringField(required=False)
    card_S = serializers.IntegerField(required=False, min_value=1)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if attrs["mode"] == "explicit" and attrs.get("h0") is None:
            raise serializers.ValidationError({"h0": "explicit mode needs h0"})
        attrs.setdefault("k_grid", [str(k) for k in settings.TOOLKIT["K_GRID"]])
        return attrs


class SVBoundConfigSerializer(BoundConfigSerializer):
    h0 = NumberStringField(default="0.6")
    epsilon = serializers.CharField(default="auto")
    eta = NumberStringField(allow_null=True, default=None, min_value=0)

    def validate_epsilon(self, value):
        if value == "auto":
            return value
        number = NumberStringField().to_internal_value(value)
        if not 0 < mp.mpf(number) < 1:
            raise serializers.ValidationError("epsilon must lie in (0, 1) or be 'auto'")
        return number


class ZetaConfigSerializer(RunConfigSerializer):
    s = NumberStringField(min_value=1, strict_min=True)
    tol = NumberStringField(default=None, allow_null=True, min_value=0, strict_min=True)


class EnumerateConfigSerializer(RunConfigSerializer):
    X = NumberStringField(min_value=0)


class SimulateConfigSerializer(RunConfigSerializer):
    t = serializers.IntegerField(min_value=2)
    p = serializers.IntegerField(allow_null=True, default=None, min_value=2)
    s = serializers.IntegerField(min_value=1)
    V = NumberStringField(min_value=0, strict_min=True)
    N = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0)
    h0 = NumberStringField(default="0.6")
    epsilon = NumberStringField(default="0.15", min_value=0, strict_min=True)
    samples_csv = serializers.CharField(allow_null=True, default=None)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if attrs["s"] >= attrs["t"]:
            raise serializers.ValidationError({"s": "need 1 <= s <= t - 1"})
        return attrs


class FigureConfigSerializer(serializers.Serializer):
    conductors = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, allow_empty=False)
    ranks = serializers.ListField(child=serializers.IntegerField(min_value=2), required=False, allow_empty=False)
    weil_cutoff = NumberStringField(required=False, min_value=1, strict_min=True)

    def validate(self, attrs):
        unknown = sorted(set(self.initial_data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: "unknown key" for key in unknown})
        attrs.setdefault("conductors", list(settings.TOOLKIT["FIGURE_CONDUCTORS"]))
        attrs.setdefault("ranks", list(settings.TOOLKIT["FIGURE_RANKS"]))
        attrs.setdefault("weil_cutoff", str(settings.TOOLKIT["FIGURE_WEIL_CUTOFF"]))
        return attrs
