#include "dche/params.hpp"

#include <json.hpp>

namespace dche {

const DcheParams& validate(const DcheParams& a) {
    if (std::abs(a.a(2)) == 0.0 || std::abs(a.a(-2)) == 0.0)
        throw DegenerateEquation("degenerate equation: A_2 * A_-2 = 0");
    return a;
}

DcheParams from_normal_form(const NormalFormParams& b) {
    DcheParams a;
    for (int p = -2; p <= 2; ++p) a.a(p) = b.b(p);
    a.a(0) = b.b(0) + 0.25;
    return validate(a);
}

NormalFormParams to_normal_form(const DcheParams& a) {
    NormalFormParams b;
    for (int p = -2; p <= 2; ++p) b.b(p) = a.a(p);
    b.b(0) = a.a(0) - 0.25;
    return b;
}

DcheParams from_jaffe_lay(const JaffeLayParams& j) {
    if (std::abs(j.alpha) == 0.0)
        throw DegenerateEquation("degenerate equation: alpha = 0 gives A_2 = A_-2 = 0");
    DcheParams a;
    const complex a2 = j.alpha * j.alpha;
    a.a(-2) = -a2 / 64.0;
    a.a(-1) = (j.gamma - j.beta - j.delta) / 16.0;
    a.a(0) = (8.0 - a2 + 4.0 * (j.beta - j.delta)) / 32.0;
    a.a(1) = (-j.gamma - j.beta - j.delta) / 16.0;
    a.a(2) = -a2 / 64.0;
    return validate(a);
}

std::pair<complex, complex> jaffe_lay_point_map(const complex& t, const JaffeLayParams& j) {
    if (std::abs(t - 1.0) < 1e-300 || std::abs(t + 1.0) < 1e-300)
        throw MapSingularity("jaffe_lay_point_map: t = +-1 is a singular point");
    const complex z = (1.0 + t) / (1.0 - t);
    const complex prefactor =
        branch_power(z, complex(-0.5, 0.0), ArgConvention::upper_closed) *
        std::exp(j.alpha / 8.0 * (z - 1.0 / z));
    return {z, prefactor};
}

DcheParams from_radial(const RadialProblem& r) {
    DcheParams a;
    a.a(-2) = r.v[0];
    a.a(-1) = r.v[1];
    a.a(0) = r.v[2]; // l(l+1) cancels against the centrifugal term
    a.a(1) = r.v[3];
    a.a(2) = r.energy;
    return validate(a);
}

std::string params_to_json(const DcheParams& a) {
    nlohmann::json j;
    auto& arr = j["A"];
    for (int p = -2; p <= 2; ++p) arr.push_back({a.a(p).real(), a.a(p).imag()});
    return j.dump();
}

DcheParams params_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto& arr = j.at("A");
    if (!arr.is_array() || arr.size() != 5)
        throw Error("params_from_json: \"A\" must be an array of five [re,im] pairs");
    DcheParams a;
    for (int i = 0; i < 5; ++i) {
        const auto& e = arr.at(i);
        a.A[static_cast<std::size_t>(i)] = complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
    return a;
}

} // namespace dche
