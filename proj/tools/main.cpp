// adelheight: batch front end for canonical heights, adelic divisors, and
// equidistribution clouds. One command per process; the artifact goes to
// --out (written atomically) or stdout. Exit 0 on success, 2 on bad input,
// 3 on numeric failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adelheight/adeliccurve.hpp"
#include "adelheight/equidist.hpp"
#include "adelheight/errors.hpp"
#include "adelheight/exactnum.hpp"
#include "adelheight/family.hpp"
#include "adelheight/globalheight.hpp"
#include "adelheight/localheight.hpp"
#include "adelheight/pcf.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace adelheight;

// ---------------------------------------------------------------- inputs

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// inline JSON when the argument looks like JSON, otherwise a file path
json load_json_arg(const std::string& arg, const std::string& what) {
    size_t i = arg.find_first_not_of(" \t\r\n");
    std::string text =
        (i != std::string::npos && (arg[i] == '{' || arg[i] == '[')) ? arg : read_file(arg);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(what + ": " + e.what());
    }
}

mpz_class js_int(const json& j, const std::string& what) {
    try {
        if (j.is_number_integer()) return mpz_class(j.get<long>());
        if (j.is_string()) return mpz_class(j.get<std::string>(), 10);
    } catch (const std::invalid_argument&) {
    }
    throw InputError(what + ": expected an integer (number or decimal string)");
}

mpq_class js_rat(const json& j, const std::string& what) {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_number_float()) return parse_rational(json(j.get<double>()).dump());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw InputError(what + ": expected a rational (number or \"a/b\" string)");
}

IntPoly js_poly(const json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + ": expected a coefficient array, lowest first");
    std::vector<mpz_class> c;
    for (const auto& e : j) c.push_back(js_int(e, what));
    return IntPoly(std::move(c));
}

RationalMap parse_map(const json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw InputError("map: expected {\"num\": [...], \"den\": [...]}");
    IntPoly num = js_poly(j.at("num"), "map num");
    IntPoly den = js_poly(j.at("den"), "map den");
    long d = std::max(num.deg(), den.deg());
    if (d < 2) throw InputError("map: degree must be at least 2");
    return RationalMap::from_forms(BinForm::homogenize(num, d), BinForm::homogenize(den, d));
}

ProjPoint parse_point(const std::string& s) {
    if (s == "infinity" || s == "inf" || s == "oo") return ProjPoint::infinity();
    return ProjPoint::from_rational(parse_rational(s));
}

LogReal parse_logreal(const json& j, const std::string& what) {
    if (j.is_object()) {
        LogReal r(j.contains("rational") ? js_rat(j.at("rational"), what + " rational")
                                         : mpq_class(0));
        if (j.contains("logs"))
            for (const auto& [p, c] : j.at("logs").items())
                r += LogReal::log_prime(mpz_class(p, 10), js_rat(c, what + " log coefficient"));
        return r;
    }
    return LogReal(js_rat(j, what));
}

OpenModel parse_model(const json& j) {
    if (!j.is_array()) throw InputError("model: expected an array of primes");
    std::vector<mpz_class> ps;
    for (const auto& e : j) ps.push_back(js_int(e, "model prime"));
    return OpenModel::spec_z(std::move(ps));
}

ArithDivisor parse_divisor(const json& j, const OpenModel& model, const std::string& what) {
    if (!j.is_object()) throw InputError(what + ": expected a divisor object");
    ArithDivisor e(model);
    if (j.contains("interior"))
        for (const auto& [p, c] : j.at("interior").items())
            e.set_interior(mpz_class(p, 10), js_int(c, what + " interior coefficient"));
    if (j.contains("boundary"))
        for (const auto& [p, c] : j.at("boundary").items()) {
            mpz_class prime(p, 10);
            if (!model.on_boundary(prime))
                throw InputError(what + ": " + prime.get_str() + " is not a boundary prime");
            e.boundary[prime] = js_rat(c, what + " boundary coefficient");
        }
    if (j.contains("arch")) e.arch = parse_logreal(j.at("arch"), what + " arch");
    return e;
}

// coefficient-wise polynomials in t: {"F": [[...],...], "G": [[...],...]}
ParamFamily parse_family(const json& j) {
    if (!j.is_object() || !j.contains("F") || !j.contains("G") || !j.at("F").is_array() ||
        !j.at("G").is_array())
        throw InputError("family: expected {\"F\": [[...],...], \"G\": [[...],...]}");
    std::vector<IntPoly> F, G;
    for (const auto& e : j.at("F")) F.push_back(js_poly(e, "family F coefficient"));
    for (const auto& e : j.at("G")) G.push_back(js_poly(e, "family G coefficient"));
    return ParamFamily::from_forms(std::move(F), std::move(G));
}

Section parse_section(const json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw InputError("section: expected {\"num\": [...], \"den\": [...]}");
    return Section::from_polys(js_poly(j.at("num"), "section num"),
                               js_poly(j.at("den"), "section den"));
}

std::pair<long, long> parse_level(const std::string& s) {
    size_t colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
        throw InputError("expected n:m, got '" + s + "'");
    try {
        return {std::stol(s.substr(0, colon)), std::stol(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InputError("expected n:m, got '" + s + "'");
    }
}

std::vector<std::pair<long, long>> parse_levels(const std::string& s) {
    std::vector<std::pair<long, long>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_level(item));
    if (out.empty()) throw InputError("levels: empty list");
    return out;
}

// --------------------------------------------------------------- outputs

std::string q_str(const mpq_class& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

json logreal_json(const LogReal& x) {
    json logs = json::object();
    for (const auto& [p, c] : x.log_terms()) logs[p.get_str()] = q_str(c);
    return {{"value", x.to_double()}, {"rational", q_str(x.rational_part())}, {"logs", logs}};
}

json place_str(const Place& v) { return v.archimedean ? "arch" : v.p.get_str(); }

json breakdown_json(const std::vector<LocalGreenValue>& rows) {
    json out = json::array();
    for (const auto& g : rows) {
        json row = {{"place", place_str(g.place)},
                    {"value", g.value.to_double()},
                    {"error", g.error_bound},
                    {"iters", g.iterations_used}};
        if (g.exact) row["exact"] = logreal_json(*g.exact);
        out.push_back(std::move(row));
    }
    return out;
}

json height_json(const HeightResult& h) {
    json out = {{"value", h.value.to_double()}, {"error", h.error_bound}, {"method", h.method}};
    if (h.exact) out["exact"] = logreal_json(*h.exact);
    if (!h.breakdown.empty()) out["breakdown"] = breakdown_json(h.breakdown);
    return out;
}

json divisor_json(const ArithDivisor& e) {
    json interior = json::object(), boundary = json::object();
    for (const auto& [p, c] : e.interior) interior[p.get_str()] = c.get_str();
    for (const auto& [p, c] : e.boundary) boundary[p.get_str()] = q_str(c);
    return {{"interior", interior}, {"boundary", boundary}, {"arch", logreal_json(e.arch)}};
}

json poly_coeffs(const IntPoly& p) {
    json out = json::array();
    for (long k = 0; k <= p.deg(); ++k) out.push_back(p.coeff(k).get_str());
    return out;
}

json cloud_json(const WeightedPointCloud& c) {
    json pts = json::array();
    for (const auto& q : c.points)
        pts.push_back({{"re", q.z.to_double_re()},
                       {"im", q.z.to_double_im()},
                       {"weight", q_str(q.weight)}});
    return {{"count", c.points.size()}, {"weight_sum", q_str(c.total_weight())}, {"points", pts}};
}

void cloud_csv(std::ostringstream& out, const WeightedPointCloud& c) {
    out << "re,im,weight\n";
    char buf[64];
    for (const auto& q : c.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,", q.z.to_double_re(), q.z.to_double_im());
        out << buf << q_str(q.weight) << "\n";
    }
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// weight-density grayscale on the bounding square, plain (P3) pixmap
std::string render_ppm(const WeightedPointCloud& c, long px) {
    if (px < 8 || px > 4096) throw InputError("heatmap: pixel count must be in [8, 4096]");
    if (c.points.empty()) throw InputError("heatmap: empty cloud");
    double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
    for (const auto& q : c.points) {
        lo_re = std::min(lo_re, q.z.to_double_re());
        hi_re = std::max(hi_re, q.z.to_double_re());
        lo_im = std::min(lo_im, q.z.to_double_im());
        hi_im = std::max(hi_im, q.z.to_double_im());
    }
    double span = std::max({hi_re - lo_re, hi_im - lo_im, 1e-6});
    double cre = (lo_re + hi_re) / 2, cim = (lo_im + hi_im) / 2, half = 0.55 * span;
    std::vector<double> cell(size_t(px) * size_t(px), 0.0);
    double wmax = 0;
    for (const auto& q : c.points) {
        long ix = long((q.z.to_double_re() - (cre - half)) / (2 * half) * double(px));
        long iy = long(((cim + half) - q.z.to_double_im()) / (2 * half) * double(px));
        ix = std::clamp(ix, 0L, px - 1);
        iy = std::clamp(iy, 0L, px - 1);
        double& w = cell[size_t(iy) * size_t(px) + size_t(ix)];
        w += q.weight.get_d();
        wmax = std::max(wmax, w);
    }
    std::ostringstream out;
    out << "P3\n" << px << " " << px << "\n255\n";
    for (double w : cell) {
        int v = wmax > 0 ? int(255.0 * std::sqrt(w / wmax) + 0.5) : 0;
        out << v << " " << v << " " << v << "\n";
    }
    return out.str();
}

void write_artifact(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp);
        out << content;
        if (!out.flush()) throw InputError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw InputError("cannot move artifact into place at " + path);
    }
}

// ------------------------------------------------------------- commands

struct Common {
    long prec = 256;
    double tol = 1e-10;
    unsigned long long seed = 0;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--prec", c.prec, "working precision in bits")->capture_default_str();
    cmd->add_option("--tol", c.tol, "error tolerance on heights")->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed for sampled clouds")->capture_default_str();
    cmd->add_option("--out", c.out, "artifact path (default: stdout)");
    cmd->add_option("--format", c.format, "artifact format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

const char* preperiodic_str(PreperiodicStatus s) {
    switch (s) {
        case PreperiodicStatus::Preperiodic: return "preperiodic";
        case PreperiodicStatus::Wandering: return "wandering";
        default: return "undetermined";
    }
}

std::string run_height(const Common& c, const std::string& map_arg, const std::string& point_arg,
                       const std::string& method) {
    RationalMap f = parse_map(load_json_arg(map_arg, "map"));
    ProjPoint x = parse_point(point_arg);
    HeightMethod primary =
        method == "tate-limit" ? HeightMethod::TateLimit : HeightMethod::LocalSum;
    HeightResult h = canonical_height(f, x, c.tol, primary);
    json out = height_json(h);
    if (method == "both") {
        HeightResult t = canonical_height(f, x, c.tol, HeightMethod::TateLimit);
        out["tate"] = {{"value", t.value.to_double()}, {"error", t.error_bound}};
        double gap = std::abs((h.value - t.value).to_double());
        out["method_agreement"] = gap <= h.error_bound + t.error_bound + 1e-15;
    }
    if (c.format == "csv") {
        std::ostringstream csv;
        csv << "value,error,method\n"
            << fmt_double(h.value.to_double()) << "," << fmt_double(h.error_bound) << ","
            << h.method << "\n";
        return csv.str();
    }
    return dump(out);
}

std::string run_local(const Common& c, const std::string& map_arg, const std::string& point_arg,
                      const std::string& place_arg) {
    RationalMap f = parse_map(load_json_arg(map_arg, "map"));
    ProjPoint x = parse_point(point_arg);
    std::vector<Place> places;
    if (place_arg.empty()) {
        places.push_back(Place::arch());
        for (const auto& [p, e] : f.bad_primes) places.push_back(Place::finite(p));
    } else if (place_arg == "arch") {
        places.push_back(Place::arch());
    } else {
        places.push_back(Place::finite(mpz_class(place_arg, 10)));
    }
    std::vector<LocalGreenValue> rows;
    for (const auto& v : places) rows.push_back(local_green(f, x, v, c.tol));
    if (c.format == "csv") {
        std::ostringstream csv;
        csv << "place,value,error,iters\n";
        for (const auto& g : rows)
            csv << place_str(g.place).get<std::string>() << "," << fmt_double(g.value.to_double())
                << "," << fmt_double(g.error_bound) << "," << g.iterations_used << "\n";
        return csv.str();
    }
    return dump(json{{"breakdown", breakdown_json(rows)}});
}

std::string run_pcf(const Common& c, const std::string& map_arg, long budget) {
    RationalMap f = parse_map(load_json_arg(map_arg, "map"));
    PcfCertificate cert = is_pcf(f, budget);
    HeightResult mass = critical_height(f, c.tol);
    const char* status = cert.status == PcfStatus::PCF      ? "PCF"
                         : cert.status == PcfStatus::NotPCF ? "NotPCF"
                                                            : "Undetermined";
    if (c.format == "csv") {
        std::ostringstream csv;
        csv << "point,degree,multiplicity,status,tail,witness_step,witness_height\n";
        for (const auto& ev : cert.critical_points)
            csv << ev.point << "," << ev.degree << "," << ev.multiplicity << ","
                << preperiodic_str(ev.status) << "," << ev.tail << "," << ev.witness_step << ","
                << fmt_double(ev.witness_height) << "\n";
        return csv.str();
    }
    json points = json::array(), evidence = json::array();
    for (const auto& ev : cert.critical_points) {
        points.push_back(ev.point);
        json row = {{"point", ev.point},
                    {"degree", ev.degree},
                    {"multiplicity", ev.multiplicity},
                    {"status", preperiodic_str(ev.status)}};
        if (ev.status == PreperiodicStatus::Preperiodic) {
            row["tail"] = ev.tail;
            row["cycle"] = ev.cycle;
        } else if (ev.status == PreperiodicStatus::Wandering) {
            row["witness_step"] = ev.witness_step;
            row["witness_height"] = ev.witness_height;
            row["comparison_bound"] = ev.comparison_bound;
        }
        evidence.push_back(std::move(row));
    }
    return dump(json{{"status", status},
                     {"critical_points", points},
                     {"critical_height", {{"value", mass.value.to_double()},
                                          {"error", mass.error_bound}}},
                     {"evidence", evidence}});
}

std::string run_enumerate(const Common& c, const std::string& map_arg, double bound) {
    RationalMap f = parse_map(load_json_arg(map_arg, "map"));
    SmallPointsResult r = small_points_enumerate(f, bound);
    if (c.format == "csv") {
        std::ostringstream csv;
        csv << "point,preperiodic,height\n";
        for (size_t i = 0; i < r.points.size(); ++i)
            csv << r.points[i].str() << "," << (r.preperiodic[i] ? 1 : 0) << ","
                << fmt_double(r.heights[i]) << "\n";
        return csv.str();
    }
    json pts = json::array();
    for (size_t i = 0; i < r.points.size(); ++i)
        pts.push_back({{"point", r.points[i].str()},
                       {"preperiodic", bool(r.preperiodic[i])},
                       {"height", r.heights[i]}});
    return dump(json{{"bound", bound},
                     {"count", r.points.size()},
                     {"essential_minimum", r.essential_minimum},
                     {"points", pts}});
}

// default comparison divisor: coefficient 1 at every boundary prime, arch 1
BoundaryDivisor default_d0(const OpenModel& model) {
    ArithDivisor d(model);
    for (const auto& p : model.boundary_primes) d.boundary[p] = 1;
    d.arch = LogReal(1);
    return BoundaryDivisor{std::move(d)};
}

std::string run_adelic(const std::string& verb, const std::string& model_arg,
                       const std::string& divisor_arg, const std::string& divisors_arg,
                       const std::string& d0_arg) {
    OpenModel model =
        model_arg.empty() ? OpenModel{} : parse_model(load_json_arg(model_arg, "model"));
    BoundaryDivisor d0 =
        d0_arg.empty() ? default_d0(model)
                       : BoundaryDivisor{parse_divisor(load_json_arg(d0_arg, "d0"), model, "d0")};
    if (verb == "limit") {
        json arr = load_json_arg(divisors_arg, "divisors");
        if (!arr.is_array()) throw InputError("divisors: expected an array of divisor objects");
        std::vector<ArithDivisor> seq;
        for (const auto& e : arr) seq.push_back(parse_divisor(e, model, "divisor"));
        CauchyLimit lim = cauchy_limit(seq, d0);
        json out = {{"cauchy", lim.cauchy}};
        if (lim.cauchy)
            out["limit"] = divisor_json(lim.limit);
        else {
            out["reason"] = lim.reason;
            out["bad_i"] = lim.bad_i;
            out["bad_j"] = lim.bad_j;
        }
        return dump(out);
    }
    ArithDivisor e = parse_divisor(load_json_arg(divisor_arg, "divisor"), model, "divisor");
    if (verb == "norm") {
        double n = boundary_norm(e, d0);
        json out;
        if (std::isfinite(n))
            out = {{"norm", n}};
        else
            out = {{"norm", "infinity"}};
        return dump(out);
    }
    if (verb == "deg") return dump(json{{"degree", logreal_json(arithmetic_degree(e))}});
    // reduce
    PicClass cls = pic_reduce(e);
    json boundary = json::object();
    for (const auto& [p, q] : cls.boundary) boundary[p.get_str()] = q_str(q);
    return dump(json{{"boundary", boundary}, {"arch", logreal_json(cls.arch)}});
}

std::string run_specialize(const Common& c, const std::string& family_arg,
                           const std::string& section_arg, const std::string& t_arg) {
    ParamFamily fam = parse_family(load_json_arg(family_arg, "family"));
    mpq_class t0 = parse_rational(t_arg);
    RationalMap f = specialize(fam, t0);
    auto [num, den] = f.as_rational_function();
    json bad = json::object();
    for (const auto& [p, e] : f.bad_primes) bad[p.get_str()] = e;
    json out = {{"t", q_str(t0)},
                {"map", {{"num", poly_coeffs(num)}, {"den", poly_coeffs(den)}}},
                {"resultant", f.res.get_str()},
                {"bad_primes", bad}};
    if (!section_arg.empty()) {
        Section sec = parse_section(load_json_arg(section_arg, "section"));
        ProjPoint x = sec.at(t0);
        HeightResult h = canonical_height(f, x, c.tol);
        out["point"] = x.str();
        out["hhat"] = {{"value", h.value.to_double()}, {"error", h.error_bound}};
    }
    return dump(out);
}

std::string run_scan(const Common& c, const std::string& family_arg,
                     const std::string& section_arg, const std::string& range_arg,
                     const std::string& step_arg) {
    ParamFamily fam = parse_family(load_json_arg(family_arg, "family"));
    Section sec = parse_section(load_json_arg(section_arg, "section"));
    size_t colon = range_arg.find(':');
    if (colon == std::string::npos) throw InputError("range: expected lo:hi");
    mpq_class lo = parse_rational(range_arg.substr(0, colon));
    mpq_class hi = parse_rational(range_arg.substr(colon + 1));
    mpq_class step = parse_rational(step_arg);
    if (step <= 0) throw InputError("step: must be positive");
    std::vector<mpq_class> ts;
    for (mpq_class t = lo; t <= hi; t += step) {
        ts.push_back(t);
        if (ts.size() > 100000) throw InputError("scan: more than 100000 sample points");
    }
    ScanReport rep = height_inequality_scan(fam, sec, ts, c.tol);
    if (c.format == "csv") {
        std::ostringstream csv;
        csv << "t,h,hhat,err,flag\n";
        for (const auto& row : rep.profile.rows) {
            csv << q_str(row.t) << "," << fmt_double(row.param_height) << ",";
            if (row.degenerate)
                csv << ",,degenerate\n";
            else
                csv << fmt_double(row.hhat.to_double()) << "," << fmt_double(row.error_bound)
                    << "," << (row.flagged ? 1 : 0) << "\n";
        }
        return csv.str();
    }
    json rows = json::array();
    for (const auto& row : rep.profile.rows) {
        json r = {{"t", q_str(row.t)},
                  {"h", row.param_height},
                  {"degenerate", row.degenerate}};
        if (!row.degenerate) {
            r["hhat"] = row.hhat.to_double();
            r["err"] = row.error_bound;
            r["flag"] = row.flagged;
        }
        rows.push_back(std::move(r));
    }
    json out = {{"rows", rows}, {"eps_defined", rep.eps_defined}};
    if (rep.eps_defined) {
        out["eps_hat"] = rep.eps_hat;
        out["c_hat"] = rep.c_hat;
    }
    json viol = json::array();
    for (const auto& t : rep.violating_t) viol.push_back(q_str(t));
    out["violating_t"] = viol;
    return dump(out);
}

DedupMode parse_mode(const std::string& s) {
    if (s == "none") return DedupMode::None;
    if (s == "monomial") return DedupMode::Monomial;
    if (s == "reduced") return DedupMode::Reduced;
    throw InputError("mode: expected none, monomial, or reduced");
}

std::string run_equidist(const Common& c, const std::string& map_arg,
                         const std::string& levels_arg, long moments,
                         const std::string& mode_arg, const std::string& equilibrium_arg,
                         const std::string& heatmap_path, long pixels) {
    RationalMap f = parse_map(load_json_arg(map_arg, "map"));
    auto levels = parse_levels(levels_arg);
    DedupMode mode = parse_mode(mode_arg);
    std::vector<WeightedPointCloud> clouds;
    for (auto [n, m] : levels) clouds.push_back(preperiodic_cloud(f, n, m, c.tol, mode));
    if (!heatmap_path.empty()) write_artifact(heatmap_path, render_ppm(clouds.back(), pixels));
    if (c.format == "csv") {
        if (clouds.size() != 1)
            throw InputError("csv output needs exactly one level; use json for several");
        std::ostringstream csv;
        cloud_csv(csv, clouds[0]);
        return csv.str();
    }
    json jlevels = json::array();
    for (size_t i = 0; i < clouds.size(); ++i) {
        json row = cloud_json(clouds[i]);
        row["n"] = levels[i].first;
        row["m"] = levels[i].second;
        jlevels.push_back(std::move(row));
    }
    json succ = json::array();
    for (size_t i = 0; i + 1 < clouds.size(); ++i)
        succ.push_back(discrepancy(clouds[i], clouds[i + 1], moments).moment_distance);
    json out = {{"mode", mode_arg},
                {"moments", moments},
                {"levels", jlevels},
                {"successive_distance", succ}};
    if (!equilibrium_arg.empty()) {
        auto [depth, count] = parse_level(equilibrium_arg);
        WeightedPointCloud eq = equilibrium_cloud(f, depth, count, c.seed);
        json dist = json::array();
        for (const auto& cl : clouds)
            dist.push_back(discrepancy(cl, eq, moments).moment_distance);
        out["equilibrium_distance"] = dist;
    }
    return dump(out);
}

std::string run_pcf_params(const Common& c, const std::string& levels_arg, long moments,
                           const std::string& heatmap_path, long pixels) {
    auto levels = parse_levels(levels_arg);
    std::vector<WeightedPointCloud> clouds;
    for (auto [n, m] : levels) clouds.push_back(pcf_parameter_cloud(n, m, c.tol));
    if (!heatmap_path.empty()) write_artifact(heatmap_path, render_ppm(clouds.back(), pixels));
    if (c.format == "csv") {
        if (clouds.size() != 1)
            throw InputError("csv output needs exactly one level; use json for several");
        std::ostringstream csv;
        cloud_csv(csv, clouds[0]);
        return csv.str();
    }
    json jlevels = json::array();
    for (size_t i = 0; i < clouds.size(); ++i) {
        json row = cloud_json(clouds[i]);
        row["n"] = levels[i].first;
        row["m"] = levels[i].second;
        jlevels.push_back(std::move(row));
    }
    json succ = json::array();
    for (size_t i = 0; i + 1 < clouds.size(); ++i)
        succ.push_back(discrepancy(clouds[i], clouds[i + 1], moments).moment_distance);
    return dump(json{{"moments", moments}, {"levels", jlevels}, {"successive_distance", succ}});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical heights, adelic divisors, and equidistribution for rational maps "
                 "over Q"};
    app.require_subcommand(1);
    Common common;

    std::string map_arg, point_arg, place_arg, method = "local-sum";
    std::string family_arg, section_arg, t_arg, range_arg, step_arg = "1";
    std::string model_arg, divisor_arg, divisors_arg, d0_arg;
    std::string levels_arg, mode_arg = "monomial", equilibrium_arg, heatmap_path;
    long budget = 64, moments = 4, pixels = 256;
    double bound = 0;

    auto* height = app.add_subcommand("height", "canonical height of a rational point");
    height->add_option("--map", map_arg, "map JSON or file")->required();
    height->add_option("--point", point_arg, "point as a/b or infinity")->required();
    height->add_option("--method", method, "local-sum, tate-limit, or both")
        ->check(CLI::IsMember({"local-sum", "tate-limit", "both"}))
        ->capture_default_str();
    add_common(height, common);

    auto* local = app.add_subcommand("local", "local Green's values at a point");
    local->add_option("--map", map_arg, "map JSON or file")->required();
    local->add_option("--point", point_arg, "point as a/b or infinity")->required();
    local->add_option("--place", place_arg, "arch or a prime (default: all bad places)");
    add_common(local, common);

    auto* pcf = app.add_subcommand("pcf", "postcritical finiteness certificate");
    pcf->add_option("--map", map_arg, "map JSON or file")->required();
    pcf->add_option("--budget", budget, "orbit steps before giving up")->capture_default_str();
    add_common(pcf, common);

    auto* enumerate = app.add_subcommand("enumerate", "rational points of small height");
    enumerate->add_option("--map", map_arg, "map JSON or file")->required();
    enumerate->add_option("--bound", bound, "canonical height bound")->required();
    add_common(enumerate, common);

    auto* adelic = app.add_subcommand("adelic", "arithmetic divisors on Spec Z");
    adelic->require_subcommand(1);
    std::vector<std::pair<const char*, const char*>> verbs = {
        {"norm", "boundary norm against a reference divisor"},
        {"deg", "exact arithmetic degree"},
        {"reduce", "reduce modulo principal divisors"},
        {"limit", "limit of a Cauchy sequence of divisors"}};
    for (auto [name, desc] : verbs) {
        auto* sub = adelic->add_subcommand(name, desc);
        sub->add_option("--model", model_arg, "boundary primes, e.g. [2,3]");
        if (std::string(name) == "limit")
            sub->add_option("--divisors", divisors_arg, "JSON array of divisors")->required();
        else
            sub->add_option("--divisor", divisor_arg, "divisor JSON or file")->required();
        if (std::string(name) == "norm" || std::string(name) == "limit")
            sub->add_option("--d0", d0_arg, "reference boundary divisor (default: unit)");
        add_common(sub, common);
    }

    auto* specialize_cmd = app.add_subcommand("specialize", "fiber map of a family at t");
    specialize_cmd->add_option("--family", family_arg, "family JSON or file")->required();
    specialize_cmd->add_option("--section", section_arg, "section JSON or file");
    specialize_cmd->add_option("--t", t_arg, "parameter value (rational)")->required();
    add_common(specialize_cmd, common);

    auto* scan = app.add_subcommand("scan", "height profile of a family along a section");
    scan->add_option("--family", family_arg, "family JSON or file")->required();
    scan->add_option("--section", section_arg, "section JSON or file")->required();
    scan->add_option("--range", range_arg, "parameter range lo:hi")->required();
    scan->add_option("--step", step_arg, "sampling step")->capture_default_str();
    add_common(scan, common);

    auto* equidist = app.add_subcommand("equidist", "preperiodic point clouds and moments");
    equidist->add_option("--map", map_arg, "map JSON or file")->required();
    equidist->add_option("--levels", levels_arg, "levels n:m, comma separated")->required();
    equidist->add_option("--moments", moments, "moment order for distances")
        ->capture_default_str();
    equidist->add_option("--mode", mode_arg, "dedup mode: none, monomial, reduced")
        ->capture_default_str();
    equidist->add_option("--equilibrium", equilibrium_arg,
                         "depth:count backward-orbit sample to compare against");
    equidist->add_option("--heatmap", heatmap_path, "write a PPM heatmap of the last cloud");
    equidist->add_option("--pixels", pixels, "heatmap resolution")->capture_default_str();
    add_common(equidist, common);

    auto* pcf_params = app.add_subcommand("pcf-params", "PCF parameter clouds for z^2 + c");
    pcf_params->add_option("--levels", levels_arg, "levels n:m, comma separated")->required();
    pcf_params->add_option("--moments", moments, "moment order for distances")
        ->capture_default_str();
    pcf_params->add_option("--heatmap", heatmap_path, "write a PPM heatmap of the last cloud");
    pcf_params->add_option("--pixels", pixels, "heatmap resolution")->capture_default_str();
    add_common(pcf_params, common);

    try {
        app.parse(argc, argv);
        PrecisionGuard guard(common.prec < 64 ? 64 : common.prec);
        std::string artifact;
        if (*height)
            artifact = run_height(common, map_arg, point_arg, method);
        else if (*local)
            artifact = run_local(common, map_arg, point_arg, place_arg);
        else if (*pcf)
            artifact = run_pcf(common, map_arg, budget);
        else if (*enumerate)
            artifact = run_enumerate(common, map_arg, bound);
        else if (*adelic)
            artifact = run_adelic(adelic->get_subcommands().at(0)->get_name(), model_arg,
                                  divisor_arg, divisors_arg, d0_arg);
        else if (*specialize_cmd)
            artifact = run_specialize(common, family_arg, section_arg, t_arg);
        else if (*scan)
            artifact = run_scan(common, family_arg, section_arg, range_arg, step_arg);
        else if (*equidist)
            artifact = run_equidist(common, map_arg, levels_arg, moments, mode_arg,
                                    equilibrium_arg, heatmap_path, pixels);
        else
            artifact = run_pcf_params(common, levels_arg, moments, heatmap_path, pixels);
        write_artifact(common.out, artifact);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    }
}
