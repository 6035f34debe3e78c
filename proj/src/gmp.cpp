// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/gmp.hpp"

#include "arraydpd/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace arraydpd {

void GmpStructure::validate() const
{
    if (max_order < 1 || max_order % 2 == 0)
        throw Error(ErrorCategory::invalid_config, "GmpStructure: max_order must be odd and positive");
    if (envelope_lag < 0)
        throw Error(ErrorCategory::invalid_config, "GmpStructure: envelope_lag must be nonnegative");
    if (memory_depth < 1)
        throw Error(ErrorCategory::invalid_config, "GmpStructure: memory_depth must be positive");
}

GmpModel::GmpModel(GmpStructure structure) : structure_(structure)
{
    structure_.validate();
    coeffs_.assign(structure_.term_count(), cd{});
}

GmpModel::GmpModel(GmpStructure structure, std::vector<cd> coeffs)
    : structure_(structure), coeffs_(std::move(coeffs))
{
    structure_.validate();
    if (coeffs_.size() != structure_.term_count())
        throw Error(ErrorCategory::size_mismatch, "GmpModel: coefficient count does not match structure");
    for (const auto& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw Error(ErrorCategory::invalid_argument, "GmpModel: non-finite coefficient");
    }
}

GmpModel GmpModel::identity(GmpStructure structure)
{
    GmpModel model(structure);
    model.set(1, 0, 0, 1.0);
    return model;
}

std::size_t GmpModel::checked_index(int p, int g, int m) const
{
    if (p < 1 || p > structure_.max_order || p % 2 == 0 || g < -structure_.envelope_lag ||
        g > structure_.envelope_lag || m < 0 || m >= structure_.memory_depth)
        throw Error(ErrorCategory::invalid_argument, "GmpModel: (p, g, m) outside structure");
    return structure_.index(p, g, m);
}

ComplexSignal gmp_evaluate(const GmpModel& model, const ComplexSignal& input)
{
    const auto& s = model.structure();
    const long len = static_cast<long>(input.size());
    if (len <= s.memory_depth + s.envelope_lag)
        throw Error(ErrorCategory::length_too_short, "gmp_evaluate: input length must exceed M + G");

    const auto x = input.samples();
    // env[i][n] = |x(n)|^{2i}
    std::vector<std::vector<double>> env(static_cast<std::size_t>(s.num_orders()));
    env[0].assign(static_cast<std::size_t>(len), 1.0);
    if (s.num_orders() > 1) {
        env[1].resize(static_cast<std::size_t>(len));
        for (long n = 0; n < len; ++n)
            env[1][static_cast<std::size_t>(n)] = std::norm(x[static_cast<std::size_t>(n)]);
    }
    for (std::size_t i = 2; i < env.size(); ++i) {
        env[i].resize(static_cast<std::size_t>(len));
        for (long n = 0; n < len; ++n)
            env[i][static_cast<std::size_t>(n)] = env[i - 1][static_cast<std::size_t>(n)] * env[1][static_cast<std::size_t>(n)];
    }

    std::vector<cd> out(static_cast<std::size_t>(len), cd{});
    for (int p = 1; p <= s.max_order; p += 2) {
        const auto& e = env[static_cast<std::size_t>((p - 1) / 2)];
        for (int g = -s.envelope_lag; g <= s.envelope_lag; ++g) {
            for (int m = 0; m < s.memory_depth; ++m) {
                const cd c = model.coeffs()[s.index(p, g, m)];
                if (c == cd{})
                    continue;
                // need 0 <= n-m < len, and 0 <= n-g-m < len unless the envelope
                // power is zero (|0|^0 = 1, so p = 1 ignores g)
                const long lo = p == 1 ? m : std::max<long>(m, g + m);
                const long hi = p == 1 ? len : std::min<long>(len, len + g + m);
                const cd* xp = x.data() + (lo - m);
                cd* op = out.data() + lo;
                if (p == 1) {
                    for (long k = 0; k < hi - lo; ++k)
                        op[k] += c * xp[k];
                    continue;
                }
                const double* ep = e.data() + (lo - g - m);
                for (long k = 0; k < hi - lo; ++k)
                    op[k] += c * (ep[k] * xp[k]);
            }
        }
    }
    return ComplexSignal(std::move(out), input.sample_rate_hz());
}

namespace {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, int line)
{
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw Error(ErrorCategory::config_parse,
                    "GMP model line " + std::to_string(line) + ": bad number '" + token + "'");
    return v;
}

}  // namespace

void write_model(std::ostream& out, const GmpModel& model)
{
    const auto& s = model.structure();
    out << "# arraydpd gmp model v1\n";
    out << "structure " << s.max_order << ' ' << s.envelope_lag << ' ' << s.memory_depth << '\n';
    out << "# p g m re im\n";
    for (int p = 1; p <= s.max_order; p += 2) {
        for (int g = -s.envelope_lag; g <= s.envelope_lag; ++g) {
            for (int m = 0; m < s.memory_depth; ++m) {
                const cd c = model.at(p, g, m);
                out << p << ' ' << g << ' ' << m << ' ' << format_double(c.real()) << ' '
                    << format_double(c.imag()) << '\n';
            }
        }
    }
}

GmpModel read_model(std::istream& in)
{
    std::string raw;
    int line = 0;
    bool have_structure = false;
    GmpStructure structure;
    std::vector<cd> coeffs;
    std::vector<bool> seen;

    while (std::getline(in, raw)) {
        ++line;
        const auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos || raw[first] == '#')
            continue;
        std::istringstream fields(raw);
        if (!have_structure) {
            std::string key;
            fields >> key >> structure.max_order >> structure.envelope_lag >> structure.memory_depth;
            if (!fields || key != "structure")
                throw Error(ErrorCategory::config_parse,
                            "GMP model line " + std::to_string(line) + ": expected 'structure P G M'");
            structure.validate();
            coeffs.assign(structure.term_count(), cd{});
            seen.assign(structure.term_count(), false);
            have_structure = true;
            continue;
        }
        int p = 0, g = 0, m = 0;
        std::string re, im, extra;
        fields >> p >> g >> m >> re >> im;
        if (!fields || (fields >> extra))
            throw Error(ErrorCategory::config_parse,
                        "GMP model line " + std::to_string(line) + ": expected 'p g m re im'");
        if (p < 1 || p > structure.max_order || p % 2 == 0 || g < -structure.envelope_lag ||
            g > structure.envelope_lag || m < 0 || m >= structure.memory_depth)
            throw Error(ErrorCategory::config_parse,
                        "GMP model line " + std::to_string(line) + ": index outside structure");
        const auto idx = structure.index(p, g, m);
        if (seen[idx])
            throw Error(ErrorCategory::config_parse,
                        "GMP model line " + std::to_string(line) + ": duplicate coefficient");
        seen[idx] = true;
        coeffs[idx] = cd(parse_double(re, line), parse_double(im, line));
    }
    if (!have_structure)
        throw Error(ErrorCategory::config_parse, "GMP model: missing structure line");
    return GmpModel(structure, std::move(coeffs));
}

void save_model(const std::filesystem::path& path, const GmpModel& model)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
    write_model(out, model);
    if (!out)
        throw Error(ErrorCategory::io, "write failed: " + path.string());
}

GmpModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open " + path.string());
    return read_model(in);
}

}  // namespace arraydpd
