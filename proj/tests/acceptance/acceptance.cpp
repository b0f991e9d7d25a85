// Acceptance run: one PASS/FAIL line per criterion, then a short report of
// the numbers behind each verdict. Exit status is non-zero if any selected
// criterion fails.
//
//   rtc_acceptance [--only 1,2,...] [--records DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "rtc/benchmark.hpp"
#include "rtc/dynamics.hpp"
#include "rtc/formats.hpp"
#include "rtc/planners.hpp"
#include "rtc/service.hpp"
#include "support/scenarios.hpp"

using namespace rtc;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_root = RTC_SOURCE_DIR;

std::string fixture(const std::string& name) { return g_root + "/fixtures/" + name; }

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

bool sameBits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool sameBits(const Pose2& a, const Pose2& b)
{
    return sameBits(a.x, b.x) && sameBits(a.y, b.y) && sameBits(a.theta, b.theta);
}

bool sameBits(const SystemConfiguration& a, const SystemConfiguration& b)
{
    if (!sameBits(a.robot, b.robot) || a.objects.size() != b.objects.size())
        return false;
    for (std::size_t i = 0; i < a.objects.size(); ++i)
        if (!sameBits(a.objects[i], b.objects[i]))
            return false;
    return true;
}

bool sameBits(std::span<const Control> a, std::span<const Control> b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!sameBits(a[i].vx, b[i].vx) || !sameBits(a[i].vy, b[i].vy) || !sameBits(a[i].omega, b[i].omega) ||
            !sameBits(a[i].duration, b[i].duration))
            return false;
    return true;
}

bool samePlanBits(const PlanResult& a, const PlanResult& b)
{
    return a.status == b.status && sameBits(a.controls, b.controls) && sameBits(a.final_state, b.final_state) &&
           a.stats.iterations == b.stats.iterations && a.stats.tree_size == b.stats.tree_size;
}

Budgets iterationBudgets(std::uint64_t overall, std::uint64_t pushing)
{
    Budgets b;
    b.overall_iterations = overall;
    b.pushing_iterations = pushing;
    return b;
}

struct Verdict
{
    int id;
    bool pass;
    std::string summary;
    std::vector<std::string> details;
};

/// Every solution produced anywhere in the run, for the soundness check.
struct Solution
{
    std::string where;
    const Scene* scene;
    std::vector<Control> controls;
    GoalSpec goal = ReachGoalObject{};
};

struct Run
{
    std::vector<Solution> solutions;
    std::vector<std::unique_ptr<Scene>> scenes; // owners for Solution::scene
    std::string records_dir;

    const Scene* keep(Scene s)
    {
        scenes.push_back(std::make_unique<Scene>(std::move(s)));
        return scenes.back().get();
    }

    void solved(std::string where, const Scene* scene, const PlanResult& r)
    {
        if (r.status == PlanStatus::Solved)
            solutions.push_back({std::move(where), scene, r.controls});
    }

    void solved(std::string where, const Scene* scene, const GrtcOutcome& o)
    {
        if (o.status == GrtcStatus::Success)
            solutions.push_back({std::move(where), scene, o.full_controls});
    }
};

std::string fmt(double v, int prec = 3)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
}

// ------------------------------------------------------------ 1 determinism

Verdict determinism(Run& run)
{
    const auto t0 = Clock::now();
    int pairs = 0, identical = 0;
    std::vector<std::string> details;
    for (Algorithm alg : {Algorithm::RRT, Algorithm::KPIECE}) {
        int solved = 0;
        for (int i = 0; i < 20; ++i) {
            // Every fifth pair is unsolvable, so failing searches are covered too.
            const Scene* s = run.keep(i % 5 == 4 ? testing::sealedPen() : generateRandomScene(300 + i, 2 + i % 9));
            PlannerRequest req;
            req.start = s->initialConfiguration();
            req.algorithm = alg;
            req.rng_seed = 1000 + i;
            req.max_iterations = 4000;
            const PlanResult first = plan(req, *s);
            bool same = true;
            for (int rep = 0; rep < 2; ++rep)
                same = same && samePlanBits(first, plan(req, *s));
            ++pairs;
            identical += same ? 1 : 0;
            solved += first.status == PlanStatus::Solved ? 1 : 0;
            run.solved("determinism " + std::string(algorithmName(alg)) + " #" + std::to_string(i), s, first);
        }
        details.push_back(std::string(algorithmName(alg)) + ": 20 pairs, " + std::to_string(solved) + " solved");
    }
    const double t = seconds(t0);
    details.push_back("runtime " + fmt(t, 1) + " s");
    return {1, identical == pairs && t <= 300.0,
            std::to_string(identical) + "/" + std::to_string(pairs) + " (scene, seed) pairs bit-identical over 3 runs",
            details};
}

// ------------------------------------------------------- 2 physics invariants

Control randomControl(std::mt19937_64& gen, const PhysicsParams& lim)
{
    std::uniform_real_distribution<double> v(-lim.v_max, lim.v_max), w(-lim.omega_max, lim.omega_max),
        d(0.1, 1.5);
    Control u{v(gen), v(gen), w(gen), d(gen)};
    u.vy = std::abs(u.vy); // drive into the shelf so contacts happen
    return u;
}

double pointSegment(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab{b.x - a.x, b.y - a.y};
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = len2 > 0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * ab.x), p.y - (a.y + t * ab.y));
}

/// Objects nothing can reach during `u`: outside the robot's swept envelope
/// and out of reach of anything that might be pushed, transitively.
std::vector<bool> untouchable(const SystemConfiguration& q, const Control& u, const Scene& s)
{
    const double travel = std::hypot(u.vx, u.vy) * u.duration;
    const Vec2 a{q.robot.x, q.robot.y}, b{q.robot.x + u.vx * u.duration, q.robot.y + u.vy * u.duration};
    const double rr = s.robot().shape.circumradius();
    const auto movables = s.movables();
    std::vector<bool> maybe(q.objects.size(), false);
    for (std::size_t i = 0; i < q.objects.size(); ++i)
        maybe[i] = pointSegment({q.objects[i].x, q.objects[i].y}, a, b) <= rr + movables[i].shape.circumradius() + 0.01;
    for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t j = 0; j < q.objects.size(); ++j) {
            if (maybe[j])
                continue;
            for (std::size_t i = 0; i < q.objects.size() && !maybe[j]; ++i)
                if (maybe[i] && std::hypot(q.objects[i].x - q.objects[j].x, q.objects[i].y - q.objects[j].y) <=
                                    movables[i].shape.circumradius() + movables[j].shape.circumradius() + travel + 0.01)
                    maybe[j] = grew = true;
        }
    }
    std::vector<bool> out(maybe.size());
    for (std::size_t i = 0; i < maybe.size(); ++i)
        out[i] = !maybe[i];
    return out;
}

Verdict physics()
{
    std::mt19937_64 gen(2024);
    int rollouts = 0, steps = 0, penetration_bad = 0, rest_checked = 0, rest_bad = 0, zero_bad = 0;
    double worst_pen = 0.0;
    for (std::uint64_t k = 1; rollouts < 1000; ++k) {
        const Scene s = generateRandomScene(5000 + k, 1 + static_cast<int>(k % 10));
        auto q = s.initialConfiguration();
        for (int j = 0; j < 5; ++j) {
            const Control u = randomControl(gen, s.physics());
            const auto keep = untouchable(q, u, s);
            const auto r = propagate(q, u, s);
            ++steps;
            for (std::size_t i = 0; i < keep.size(); ++i)
                if (keep[i]) {
                    ++rest_checked;
                    rest_bad += sameBits(r.state.objects[i], q.objects[i]) ? 0 : 1;
                }
            const Control zero{0.0, 0.0, 0.0, u.duration};
            const auto z = propagate(q, zero, s);
            zero_bad += (z.report.valid && sameBits(z.state, q)) ? 0 : 1;
            if (!r.report.valid)
                break;
            const double pen = maxPenetration(r.state, s);
            worst_pen = std::max(worst_pen, pen);
            penetration_bad += pen <= 1e-3 ? 0 : 1;
            q = r.state;
        }
        ++rollouts;
    }

    int halving_bad = 0;
    double worst_halving = 0.0;
    const auto suite = testing::pushSuite();
    for (const auto& sc : suite) {
        PhysicsParams half = sc.scene.physics();
        half.dt *= 0.5;
        const Scene fine = sc.scene.withPhysics(half);
        const auto a = propagate(sc.scene.initialConfiguration(), sc.control, sc.scene);
        const auto b = propagate(fine.initialConfiguration(), sc.control, fine);
        const double diff = testing::maxPoseDifference(a.state, b.state);
        worst_halving = std::max(worst_halving, diff);
        halving_bad += (a.report.valid && b.report.valid && diff <= 1e-3) ? 0 : 1;
    }

    const bool pass = penetration_bad == 0 && rest_bad == 0 && zero_bad == 0 && halving_bad == 0;
    return {2,
            pass,
            std::to_string(rollouts) + " rollouts (" + std::to_string(steps) + " controls), " +
                std::to_string(suite.size()) + " halving scenarios",
            {"worst penetration " + fmt(worst_pen * 1000, 4) + " mm, violations " + std::to_string(penetration_bad),
             "untouched-object checks " + std::to_string(rest_checked) + ", moved " + std::to_string(rest_bad),
             "zero-control identity failures " + std::to_string(zero_bad),
             "worst substep-halving difference " + fmt(worst_halving * 1000, 4) + " mm, failures " +
                 std::to_string(halving_bad)}};
}

// -------------------------------------------------------- shelf benchmark

struct ShelfScene
{
    std::string id;
    const Scene* scene;
    OperatorScript script;
};

std::vector<ShelfScene> shelfSuite(Run& run)
{
    std::vector<ShelfScene> out;
    for (int i = 1; i <= 10; ++i) {
        const std::string id = "seed" + std::to_string(i);
        out.push_back({id, run.keep(loadSceneFile(fixture("shelf10/" + id + ".json"))),
                       parseScript(readTextFile(fixture("shelf10/scripts/" + id + ".json")))});
    }
    return out;
}

struct Cells
{
    std::map<SessionMode, std::vector<BenchmarkRecord>> by_mode;
};

/// Runs the shelf suite for `modes` under the time budgets, 5 seeds each.
void runShelf(Run& run, Cells& cells, std::initializer_list<SessionMode> modes)
{
    const auto suite = shelfSuite(run);
    Budgets budgets;
    budgets.t_overall = 60.0;
    budgets.t_pushing = 10.0;
    for (SessionMode mode : modes) {
        if (cells.by_mode.count(mode))
            continue;
        auto& recs = cells.by_mode[mode];
        std::ofstream log;
        if (!run.records_dir.empty())
            log.open(run.records_dir + "/shelf_" + std::string(sessionModeName(mode)) + ".jsonl");
        for (const auto& sc : suite)
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                auto strategy = makeStrategy(mode, seed, budgets, sc.script);
                const GrtcOutcome out = runGRTC(*sc.scene, *strategy, budgets, plannerFor(mode, seed));
                recs.push_back(makeRecord(sc.id, mode, seed, out));
                run.solved("shelf " + sc.id + " " + std::string(sessionModeName(mode)) + " seed " +
                               std::to_string(seed),
                           sc.scene, out);
                if (log)
                    log << recordToJson(recs.back()).dump() << '\n' << std::flush;
                std::cerr << "  " << sessionModeName(mode) << ' ' << sc.id << " seed " << seed << ": "
                          << recs.back().status << " (" << fmt(recs.back().planning_time, 2) << " s)\n";
            }
    }
}

double successRate(const std::vector<BenchmarkRecord>& rs)
{
    if (rs.empty())
        return 0.0;
    return static_cast<double>(std::count_if(rs.begin(), rs.end(), [](const auto& r) { return r.success; })) /
           static_cast<double>(rs.size());
}

std::string rateLine(SessionMode m, const std::vector<BenchmarkRecord>& rs)
{
    std::vector<double> xs;
    for (const auto& r : rs)
        xs.push_back(r.success ? 1.0 : 0.0);
    const Interval ci = meanInterval(xs);
    return std::string(sessionModeName(m)) + " success " + fmt(ci.mean, 2) + " +- " + fmt(ci.half_width, 2) + " (n=" +
           std::to_string(ci.n) + ")";
}

Verdict guidanceBenefit(Run& run, Cells& cells)
{
    runShelf(run, cells, {SessionMode::Scripted, SessionMode::BareRRT, SessionMode::BareKPIECE});
    const auto& scripted = cells.by_mode[SessionMode::Scripted];
    const auto& rrt = cells.by_mode[SessionMode::BareRRT];
    const auto& kpiece = cells.by_mode[SessionMode::BareKPIECE];
    const double s = successRate(scripted), r = successRate(rrt), k = successRate(kpiece);
    const bool rate_ok = s >= 2.0 * r && s >= 1.5 * k;

    // Mean planning time over successful cells of scenes both modes solved
    // at least once.
    std::set<std::string> s_ok, r_ok;
    for (const auto& x : scripted)
        if (x.success)
            s_ok.insert(x.scene_id);
    for (const auto& x : rrt)
        if (x.success)
            r_ok.insert(x.scene_id);
    auto meanTime = [&](const std::vector<BenchmarkRecord>& rs) {
        double sum = 0.0;
        int n = 0;
        for (const auto& x : rs)
            if (x.success && s_ok.count(x.scene_id) && r_ok.count(x.scene_id)) {
                sum += x.planning_time;
                ++n;
            }
        return n ? sum / n : std::nan("");
    };
    const double ts = meanTime(scripted), tr = meanTime(rrt);
    std::size_t shared = 0;
    for (const auto& id : s_ok)
        shared += r_ok.count(id);
    const bool time_ok = shared > 0 && ts < tr;

    return {4,
            rate_ok && time_ok,
            "success Scripted " + fmt(s, 2) + ", RRT " + fmt(r, 2) + ", KPIECE " + fmt(k, 2) + "; planning time " +
                fmt(ts, 2) + " s vs RRT " + fmt(tr, 2) + " s",
            {rateLine(SessionMode::Scripted, scripted), rateLine(SessionMode::BareRRT, rrt),
             rateLine(SessionMode::BareKPIECE, kpiece),
             std::string("rate rule (>= 2x RRT and >= 1.5x KPIECE): ") + (rate_ok ? "met" : "not met"),
             "scenes solved by both: " + std::to_string(shared) + "; time rule (Scripted < RRT): " +
                 (time_ok ? "met" : "not met")}};
}

Verdict actionInflation(Run& run, Cells& cells)
{
    runShelf(run, cells, {SessionMode::Scripted, SessionMode::Heuristic});
    auto mean = [](const std::vector<BenchmarkRecord>& rs, auto field) {
        double sum = 0.0;
        for (const auto& r : rs)
            sum += static_cast<double>(field(r));
        return rs.empty() ? 0.0 : sum / static_cast<double>(rs.size());
    };
    const auto& h = cells.by_mode[SessionMode::Heuristic];
    const auto& s = cells.by_mode[SessionMode::Scripted];
    const auto proposed = [](const BenchmarkRecord& r) { return r.proposed_actions; };
    const auto successful = [](const BenchmarkRecord& r) { return r.successful_actions; };
    const double hp = mean(h, proposed), sp = mean(s, proposed);
    const double hs = mean(h, successful), ss = mean(s, successful);
    const bool inflation = hp >= 5.0 * sp;
    const bool comparable = hs > 0 && ss > 0 && hs <= 2.0 * ss && ss <= 2.0 * hs;
    return {5,
            inflation && comparable,
            "proposed Heuristic " + fmt(hp, 1) + " vs Scripted " + fmt(sp, 1) + "; successful " + fmt(hs, 1) + " vs " +
                fmt(ss, 1),
            {rateLine(SessionMode::Heuristic, h),
             std::string("inflation rule (>= 5x): ") + (inflation ? "met" : "not met") + ", ratio " +
                 fmt(sp > 0 ? hp / sp : 0.0, 2),
             std::string("successful-actions rule (within 2x): ") + (comparable ? "met" : "not met")}};
}

// ------------------------------------------------------------------ 6 NAMO

Verdict namoFailureMode(Run& run)
{
    NamoParams params;
    params.plan_iterations = 20000;
    std::map<std::string, int> counts;
    int blocked = 0, unplannable = 0;
    for (const auto& sc : shelfSuite(run))
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Rng rng(seed);
            const NamoResult r =
                namoNext(sc.scene->initialConfiguration(), *sc.scene, plannerFor(SessionMode::NAMO, seed), rng, params);
            ++counts[std::string(namoStatusName(r.status))];
            blocked += r.rejected_blocked;
            unplannable += r.rejected_unplannable;
            std::cerr << "  NAMO " << sc.id << " seed " << seed << ": " << namoStatusName(r.status) << '\n';
        }
    const Scene* sparse = run.keep(loadSceneFile(fixture("sparse2/seed1.json")));
    int plans = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Rng rng(seed);
        const NamoResult r =
            namoNext(sparse->initialConfiguration(), *sparse, plannerFor(SessionMode::NAMO, seed), rng, params);
        plans += r.status == NamoStatus::Plan ? 1 : 0;
    }
    const int exhausted = counts["PlacementExhausted"];
    const bool pass = exhausted >= 40 && plans >= 40;
    std::string breakdown;
    for (const auto& [k, v] : counts)
        breakdown += (breakdown.empty() ? "" : ", ") + k + " " + std::to_string(v);
    return {6,
            pass,
            "PlacementExhausted " + std::to_string(exhausted) + "/50 on shelf10; Plan " + std::to_string(plans) +
                "/50 on sparse2",
            {"shelf10 statuses: " + breakdown,
             "rejected placements: blocked " + std::to_string(blocked) + ", unplannable " +
                 std::to_string(unplannable)}};
}

// ----------------------------------------------------- 7 degradation

Verdict degradation(Run& run)
{
    std::vector<const Scene*> scenes;
    for (int i = 0; i < 8; ++i)
        scenes.push_back(run.keep(generateRandomScene(700 + i, 1 + i)));
    scenes.push_back(run.keep(testing::emptyShelf()));
    scenes.push_back(run.keep(testing::sealedPen()));

    int equal = 0, total = 0, solved = 0;
    const std::uint64_t iterations = 6000;
    for (Algorithm alg : {Algorithm::RRT, Algorithm::KPIECE})
        for (std::size_t i = 0; i < scenes.size(); ++i) {
            const Scene& s = *scenes[i];
            PlannerConfig cfg;
            cfg.algorithm = alg;
            cfg.seed = 40 + i;
            ImmediateGoalStrategy strategy;
            const GrtcOutcome out = runGRTC(s, strategy, iterationBudgets(iterations, 0), cfg);

            PlannerRequest req;
            req.start = s.initialConfiguration();
            req.algorithm = alg;
            req.rng_seed = cfg.seed;
            req.max_iterations = iterations;
            const PlanResult direct = plan(req, s);

            GrtcStatus expected = GrtcStatus::OverallTimeout;
            if (direct.status == PlanStatus::Solved)
                expected = GrtcStatus::Success;
            const bool same = out.status == expected && sameBits(out.full_controls, direct.controls) &&
                              out.iterations == direct.stats.iterations;
            equal += same ? 1 : 0;
            solved += direct.status == PlanStatus::Solved ? 1 : 0;
            ++total;
            run.solved("degradation direct #" + std::to_string(total), &s, direct);
            run.solved("degradation GRTC #" + std::to_string(total), &s, out);
        }
    return {7,
            equal == total,
            std::to_string(equal) + "/" + std::to_string(total) + " runs identical to the direct planner call",
            {std::to_string(scenes.size()) + " scenes x {RRT, KPIECE}, " + std::to_string(iterations) +
                 " iterations; " + std::to_string(solved) + " solved, " + std::to_string(total - solved) + " not"}};
}

// ------------------------------------------------------------ 8 parallel

struct Operator
{
    std::string ref;
    OperatorScript script;
    std::chrono::milliseconds wait;
    std::string id;
    std::size_t cursor = 0;
    std::optional<Clock::time_point> asked;
    double injected = 0.0;
    std::optional<proto::Closed> closed;
};

Verdict parallel(Run& run)
{
    const auto suite = shelfSuite(run);
    const Budgets budgets = iterationBudgets(60000, 20000);
    const std::chrono::milliseconds waits[] = {300ms, 500ms, 700ms, 1000ms};

    service::Server server({});
    service::Client client;
    client.connect("127.0.0.1", server.start(), "acceptance");
    std::vector<Operator> ops;
    for (std::size_t i = 0; i < 4; ++i) {
        ops.push_back({suite[i].id, suite[i].script, waits[i], {}, 0, {}, 0.0, {}});
        client.send(proto::OpenSession{suite[i].id, serializeScene(*suite[i].scene), SessionMode::HITL, 1 + i, budgets,
                                       std::nullopt});
    }

    std::vector<std::string> problems;
    auto byId = [&](const std::string& id) -> Operator* {
        for (auto& o : ops)
            if (o.id == id)
                return &o;
        return nullptr;
    };
    const auto deadline = Clock::now() + 30min;
    auto done = [&] { return std::all_of(ops.begin(), ops.end(), [](const Operator& o) { return o.closed; }); };
    while (!done() && Clock::now() < deadline) {
        // Hand out input whose waiting time is up.
        for (auto& o : ops)
            if (o.asked && Clock::now() >= *o.asked + o.wait) {
                o.injected += seconds(*o.asked);
                o.asked.reset();
                const HighLevelAction& a = o.script.entries[std::min(o.cursor, o.script.entries.size() - 1)];
                o.cursor = std::min(o.cursor + 1, o.script.entries.size() - 1);
                if (a.centroid) {
                    client.send(proto::SelectObjectMsg{o.id, a.object});
                    client.send(proto::SelectPointMsg{o.id, *a.centroid});
                } else {
                    client.send(proto::ReachGoalMsg{o.id});
                }
            }
        auto m = client.receive(5ms);
        if (!m)
            continue;
        if (auto* snap = std::get_if<proto::StateSnapshot>(&*m); snap && snap->ref) {
            for (auto& o : ops)
                if (o.ref == *snap->ref)
                    o.id = snap->session;
        } else if (auto* st = std::get_if<proto::StatusChanged>(&*m)) {
            if (Operator* o = byId(st->session); o && st->status == proto::SessionStatus::AwaitingInput)
                o->asked = Clock::now();
        } else if (auto* c = std::get_if<proto::Closed>(&*m)) {
            if (Operator* o = byId(c->session))
                o->closed = *c;
        } else if (auto* e = std::get_if<proto::Error>(&*m)) {
            problems.push_back("server error " + e->code + ": " + e->message);
        }
    }
    client.close();
    server.stop();

    int idle_ok = 0, equivalent = 0;
    std::vector<std::string> details;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const Operator& o = ops[i];
        if (!o.closed) {
            problems.push_back(o.ref + " never closed");
            continue;
        }
        BenchmarkRecord wire = o.closed->record;
        const double idle = wire.idle_time;
        const bool within = std::abs(idle - o.injected) <= 0.5;
        idle_ok += within ? 1 : 0;

        // The same session run alone, with the operator replaced by its script.
        auto strategy = makeStrategy(SessionMode::Scripted, 1 + i, budgets, o.script);
        const GrtcOutcome out = runGRTC(*suite[i].scene, *strategy, budgets, plannerFor(SessionMode::Scripted, 1 + i));
        const BenchmarkRecord seq = makeRecord(o.ref, SessionMode::Scripted, 1 + i, out);
        run.solved("parallel " + o.ref, suite[i].scene, out);
        wire.mode = SessionMode::Scripted;
        const bool same = wire.sameOutcome(seq);
        equivalent += same ? 1 : 0;
        details.push_back(o.ref + ": injected " + fmt(o.injected, 2) + " s, idle " + fmt(idle, 2) + " s, " +
                          wire.status + ", sequential " + (same ? "identical" : "DIFFERENT"));
    }
    details.insert(details.end(), problems.begin(), problems.end());
    return {8,
            idle_ok == 4 && equivalent == 4 && problems.empty(),
            std::to_string(idle_ok) + "/4 idle times within 0.5 s, " + std::to_string(equivalent) +
                "/4 records equal to sequential runs",
            details};
}

// ------------------------------------------------------------ 3 soundness

Verdict soundness(const Run& run)
{
    int bad = 0;
    std::vector<std::string> details;
    for (const auto& s : run.solutions)
        if (!validateSolution(s.scene->initialConfiguration(), s.controls, s.goal, *s.scene)) {
            ++bad;
            details.push_back("replay rejected: " + s.where);
        }
    return {3, bad == 0 && !run.solutions.empty(),
            std::to_string(run.solutions.size() - bad) + "/" + std::to_string(run.solutions.size()) +
                " solutions from this run pass independent replay",
            details};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance run"};
    std::vector<int> only;
    Run run;
    app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 8));
    app.add_option("--records", run.records_dir, "Directory for the shelf benchmark records");
    app.add_option("--root", g_root, "Source tree holding fixtures/");
    CLI11_PARSE(app, argc, argv);
    if (only.empty())
        only = {1, 2, 3, 4, 5, 6, 7, 8};
    auto wanted = [&](int c) { return std::find(only.begin(), only.end(), c) != only.end(); };

    std::vector<Verdict> verdicts;
    Cells cells;
    auto step = [&](int c, auto&& fn) {
        if (!wanted(c))
            return;
        const auto t0 = Clock::now();
        std::cerr << "criterion " << c << " ...\n";
        verdicts.push_back(fn());
        verdicts.back().details.push_back("wall time " + fmt(seconds(t0), 1) + " s");
        std::cerr << "criterion " << c << " done in " << fmt(seconds(t0), 1) << " s\n";
    };
    // Soundness last: it replays what the others produced.
    step(1, [&] { return determinism(run); });
    step(2, [&] { return physics(); });
    step(7, [&] { return degradation(run); });
    step(8, [&] { return parallel(run); });
    step(6, [&] { return namoFailureMode(run); });
    step(4, [&] { return guidanceBenefit(run, cells); });
    step(5, [&] { return actionInflation(run, cells); });
    step(3, [&] { return soundness(run); });

    std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
    bool all = true;
    for (const auto& v : verdicts) {
        std::cout << "criterion " << v.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.summary << '\n';
        all = all && v.pass;
    }
    std::cout << '\n';
    for (const auto& v : verdicts) {
        std::cout << "[" << v.id << "]\n";
        for (const auto& d : v.details)
            std::cout << "  " << d << '\n';
    }
    return all ? 0 : 1;
}
