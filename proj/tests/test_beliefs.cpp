#include <gtest/gtest.h>

#include <random>

#include "arena/beliefs.hpp"

using namespace arena;

namespace {

Term I(int v) { return Term::integer(v); }
Term V(const char* n) { return Term::var(n); }

std::vector<PlanRule> vacuum_plans() {
    return {
        {"suck",
         {EventKind::GoalAddition, atom("cleaning"), {}},
         {Literal::pos(atom("in", {V("X"), V("Y")})), Literal::pos(atom("dirt", {V("X"), V("Y")}))},
         {Step::action(atom("do", {Term::atom("suck")}))}},
        {"right",
         {EventKind::GoalAddition, atom("cleaning"), {}},
         {Literal::pos(atom("in", {V("X"), V("Y")})), Literal::pos(atom("dirt", {V("X2"), V("Y")})),
          Literal::test(V("X2"), CmpOp::Eq, V("X"), 1)},
         {Step::action(atom("do", {Term::atom("right")}))}},
    };
}

/// Scripted context: `move(D)` and `do(_)` are one-shot world actions,
/// `walk` is durative, `fail` fails.
class FakeAgent : public AgentContext {
public:
    explicit FakeAgent(std::vector<PlanRule> lib) : lib_(std::move(lib)) {}

    BeliefBase& beliefs() override { return reasoner.beliefs(); }
    const std::vector<PlanRule>& library() const override { return lib_; }
    ActionResult perform(const BeliefAtom& a) override {
        performed.push_back(a.to_string());
        if (a.predicate == "fail") return ActionResult::failed();
        if (a.predicate == "walk") return ActionResult::running(ActionIntent::move(Direction::East));
        if (a.predicate == "note") return ActionResult::completed();
        return ActionResult::released(ActionIntent::move(Direction::East));
    }
    void send(const Term& to, const BeliefAtom& content) override { sent.push_back(to.to_string() + ":" + content.to_string()); }
    bool org_directive(const BeliefAtom& d) override {
        directives.push_back(d.to_string());
        return d.predicate != "forbidden";
    }
    void post(Event e) override { posted.push_back(e.to_string()); }
    void goal_completed(const Event& e) override { completed.push_back(e.atom.to_string()); }

    Reasoner reasoner;
    std::vector<std::string> performed, sent, directives, posted, completed;

private:
    std::vector<PlanRule> lib_;
};

} // namespace

TEST(Unify, BindsVariables) {
    BeliefBase b;
    b.add(atom("dirt", {I(1), I(2)}));
    const auto subs = unify(atom("dirt", {V("X"), V("Y")}), b);
    ASSERT_EQ(subs.size(), 1u);
    EXPECT_EQ(subs[0].at("X"), I(1));
    EXPECT_EQ(subs[0].at("Y"), I(2));
}

TEST(Unify, GuardFiltersBombsZero) {
    BeliefBase b;
    b.add(atom("bombs", {I(0)}));
    EXPECT_TRUE(solve(bombs_positive("N"), b).empty());
    b.add(atom("bombs", {I(2)}));
    EXPECT_EQ(solve(bombs_positive("N"), b).size(), 1u);
}

TEST(Unify, WildcardMatchesWithoutBinding) {
    BeliefBase b;
    b.add(atom("clear", {I(3), I(4)}));
    const auto subs = unify(atom("clear", {Term::any(), Term::any()}), b);
    ASSERT_EQ(subs.size(), 1u);
    EXPECT_TRUE(subs[0].empty());
}

TEST(Unify, RepeatedVariableMustAgree) {
    BeliefBase b;
    b.add(atom("p", {I(1), I(2)}));
    b.add(atom("p", {I(3), I(3)}));
    const auto subs = unify(atom("p", {V("X"), V("X")}), b);
    ASSERT_EQ(subs.size(), 1u);
    EXPECT_EQ(subs[0].at("X"), I(3));
}

TEST(Unify, ExistingBindingsConstrain) {
    BeliefBase b;
    b.add(atom("p", {I(1)}));
    b.add(atom("p", {I(2)}));
    EXPECT_EQ(unify(atom("p", {V("X")}), b, {{"X", I(2)}}).size(), 1u);
    EXPECT_TRUE(unify(atom("p", {V("X")}), b, {{"X", I(5)}}).empty());
}

TEST(Unify, SoundAndCompleteAgainstEnumeration) {
    std::mt19937_64 rng(3);
    const std::vector<Term> domain{I(0), I(1), I(2), Term::atom("a"), Term::atom("b")};
    const std::vector<std::string> vars{"X", "Y"};
    for (int round = 0; round < 300; ++round) {
        BeliefBase b;
        const int n = static_cast<int>(rng() % 51);
        for (int i = 0; i < n; ++i)
            b.add(atom(rng() % 2 ? "p" : "q", {domain[rng() % domain.size()], domain[rng() % domain.size()],
                                               domain[rng() % domain.size()]}));
        std::vector<Term> args;
        for (int k = 0; k < 3; ++k) {
            switch (rng() % 4) {
            case 0: args.push_back(domain[rng() % domain.size()]); break;
            case 1: args.push_back(Term::any()); break;
            default: args.push_back(Term::var(vars[rng() % 2])); break;
            }
        }
        const BeliefAtom pattern = atom("p", args);

        std::set<Substitution> want;
        for (const Term& x : domain) {
            for (const Term& y : domain) {
                const Substitution full{{"X", x}, {"Y", y}};
                for (const auto& a : b.atoms()) {
                    if (a.predicate != "p") continue;
                    bool ok = true;
                    for (std::size_t k = 0; k < 3; ++k) {
                        const Term& t = args[k];
                        if (t.is_wildcard()) continue;
                        const Term v = t.is_var() ? full.at(t.name()) : t;
                        if (!(v == a.args[k])) ok = false;
                    }
                    if (!ok) continue;
                    Substitution used;
                    for (const auto& t : args)
                        if (t.is_var()) used.insert_or_assign(t.name(), full.at(t.name()));
                    want.insert(used);
                }
            }
        }
        const auto got = unify(pattern, b);
        EXPECT_EQ(std::set<Substitution>(got.begin(), got.end()), want);
    }
}

TEST(BeliefBase, FunctionalPredicatesReplace) {
    BeliefBase b;
    b.add(cell_atom("pos", {1, 1}));
    b.add(cell_atom("pos", {2, 1}));
    b.add(atom("bombs", {I(1)}));
    b.add(atom("bombs", {I(0)}));
    b.add(cell_atom("clear", {1, 1}));
    b.add(cell_atom("clear", {2, 2}));
    EXPECT_EQ(unify(atom("pos", {Term::any(), Term::any()}), b).size(), 1u);
    EXPECT_TRUE(b.contains(cell_atom("pos", {2, 1})));
    EXPECT_TRUE(b.contains(atom("bombs", {I(0)})));
    EXPECT_EQ(unify(atom("clear", {Term::any(), Term::any()}), b).size(), 2u);
}

TEST(SelectPlan, VacuumSucksWhenDirtHere) {
    const auto lib = vacuum_plans();
    BeliefBase b;
    b.add(atom("in", {I(1), I(1)}));
    b.add(atom("dirt", {I(1), I(1)}));
    const auto sel = select_plan(goal_event(atom("cleaning")), lib, b);
    ASSERT_TRUE(std::holds_alternative<PlanInstance>(sel));
    const auto& inst = std::get<PlanInstance>(sel);
    EXPECT_EQ(inst.rule->label, "suck");
    EXPECT_EQ(inst.resolved_body()[0].content.to_string(), "do(suck)");
}

TEST(SelectPlan, VacuumMovesRightWhenDirtToTheRight) {
    const auto lib = vacuum_plans();
    BeliefBase b;
    b.add(atom("in", {I(1), I(1)}));
    b.add(atom("dirt", {I(2), I(1)}));
    const auto sel = select_plan(goal_event(atom("cleaning")), lib, b);
    ASSERT_TRUE(std::holds_alternative<PlanInstance>(sel));
    EXPECT_EQ(std::get<PlanInstance>(sel).resolved_body()[0].content.to_string(), "do(right)");
}

TEST(SelectPlan, NoMatchingTriggerFails) {
    const auto lib = vacuum_plans();
    BeliefBase b;
    EXPECT_TRUE(std::holds_alternative<EventFailed>(select_plan(goal_event(atom("dancing")), lib, b)));
    b.add(atom("in", {I(1), I(1)}));
    EXPECT_TRUE(std::holds_alternative<EventFailed>(select_plan(goal_event(atom("cleaning")), lib, b)));
}

TEST(SelectPlan, PermutingNonMatchingRulesKeepsResult) {
    auto lib = vacuum_plans();
    for (int i = 0; i < 4; ++i)
        lib.push_back({"noise" + std::to_string(i), {EventKind::GoalAddition, atom("other" + std::to_string(i)), {}}, {}, {}});
    BeliefBase b;
    b.add(atom("in", {I(1), I(1)}));
    b.add(atom("dirt", {I(2), I(1)}));
    std::mt19937_64 rng(9);
    for (int round = 0; round < 20; ++round) {
        std::vector<PlanRule> shuffled;
        std::vector<PlanRule> noise(lib.begin() + 2, lib.end());
        std::shuffle(noise.begin(), noise.end(), rng);
        // Keep the relative order of the two matching rules, scatter the rest.
        shuffled = noise;
        shuffled.insert(shuffled.begin() + static_cast<long>(rng() % (shuffled.size() + 1)), lib[0]);
        auto after = std::find_if(shuffled.begin(), shuffled.end(), [](const PlanRule& r) { return r.label == "suck"; });
        const long offset = static_cast<long>(rng() % (std::distance(after, shuffled.end())));
        shuffled.insert(after + 1 + offset, lib[1]);
        const auto sel = select_plan(goal_event(atom("cleaning")), shuffled, b);
        ASSERT_TRUE(std::holds_alternative<PlanInstance>(sel));
        EXPECT_EQ(std::get<PlanInstance>(sel).rule->label, "right");
    }
}

TEST(SelectPlan, AnnotationsBindFromEvent) {
    std::vector<PlanRule> lib{{"ann",
                               {EventKind::GoalAddition, atom("exploreMap"), {{"scheme", V("S")}}},
                               {},
                               {Step::org(atom("set_goal_state", {V("S"), Term::atom("exploreMap")}))}}};
    BeliefBase b;
    EXPECT_TRUE(std::holds_alternative<EventFailed>(select_plan(goal_event(atom("exploreMap")), lib, b)));
    const auto sel = select_plan(goal_event(atom("exploreMap"), {{"scheme", I(4)}, {"source", Term::atom("org")}}), lib, b);
    ASSERT_TRUE(std::holds_alternative<PlanInstance>(sel));
    EXPECT_EQ(std::get<PlanInstance>(sel).resolved_body()[0].content.to_string(), "set_goal_state(4,exploreMap)");
}

TEST(PlanRule, UnboundBodyVariablesDetected) {
    PlanRule ok{"ok", {EventKind::GoalAddition, atom("g", {V("X")}), {}}, {}, {Step::add(atom("p", {V("X")}))}};
    PlanRule bad{"bad", {EventKind::GoalAddition, atom("g"), {}}, {}, {Step::add(atom("p", {V("Z")}))}};
    EXPECT_TRUE(unbound_body_vars(ok).empty());
    EXPECT_EQ(unbound_body_vars(bad), std::vector<std::string>{"Z"});
}

TEST(Intention, BeliefOnlyBodyProducesNoAction) {
    FakeAgent ag({{"p", {EventKind::GoalAddition, atom("g"), {}}, {}, {Step::add(atom("clear", {I(3), I(4)}))}}});
    ag.reasoner.post(goal_event(atom("g")));
    EXPECT_FALSE(ag.reasoner.cycle(ag));
    EXPECT_TRUE(ag.beliefs().contains(atom("clear", {I(3), I(4)})));
    EXPECT_EQ(ag.posted, std::vector<std::string>{"+clear(3,4)"});
    EXPECT_FALSE(ag.reasoner.busy());
}

TEST(Intention, OneWorldActionPerTick) {
    FakeAgent ag({{"p",
                   {EventKind::GoalAddition, atom("g"), {}},
                   {},
                   {Step::action(atom("move", {Term::atom("e")})), Step::add(atom("x"))}}});
    ag.reasoner.post(goal_event(atom("g")));
    const auto first = ag.reasoner.cycle(ag);
    ASSERT_TRUE(first);
    EXPECT_EQ(*first, ActionIntent::move(Direction::East));
    EXPECT_FALSE(ag.beliefs().contains(atom("x")));
    EXPECT_FALSE(ag.reasoner.cycle(ag));
    EXPECT_TRUE(ag.beliefs().contains(atom("x")));
}

TEST(Intention, SubgoalRunsToCompletionFirst) {
    FakeAgent ag({
        {"explore",
         {EventKind::GoalAddition, atom("exploreMap"), {}},
         {},
         {Step::subgoal(atom("findUnexploredArea")), Step::add(atom("after_find")), Step::subgoal(atom("moveToUnexploredArea"))}},
        {"find", {EventKind::GoalAddition, atom("findUnexploredArea"), {}}, {}, {Step::action(atom("note")), Step::add(atom("found"))}},
        {"move", {EventKind::GoalAddition, atom("moveToUnexploredArea"), {}}, {Literal::pos(atom("after_find"))}, {Step::action(atom("move"))}},
    });
    ag.reasoner.post(goal_event(atom("exploreMap")));
    ASSERT_TRUE(ag.reasoner.cycle(ag));
    EXPECT_EQ(ag.performed, (std::vector<std::string>{"note", "move"}));
    EXPECT_EQ(ag.posted, (std::vector<std::string>{"+found", "+after_find"}));
    EXPECT_EQ(ag.completed, std::vector<std::string>{"findUnexploredArea"});
    EXPECT_FALSE(ag.reasoner.cycle(ag));
    EXPECT_EQ(ag.completed, (std::vector<std::string>{"findUnexploredArea", "moveToUnexploredArea"}));
}

TEST(Intention, FailedSubgoalFailsInstance) {
    FakeAgent ag({{"p", {EventKind::GoalAddition, atom("g"), {}}, {}, {Step::subgoal(atom("nothing")), Step::add(atom("x"))}}});
    std::vector<std::string> failed;
    ag.reasoner.on_event_failed = [&](const Event& e) { failed.push_back(e.to_string()); };
    ag.reasoner.post(goal_event(atom("g")));
    EXPECT_FALSE(ag.reasoner.cycle(ag));
    EXPECT_FALSE(ag.beliefs().contains(atom("x")));
    EXPECT_EQ(failed, std::vector<std::string>{"+!g"});
}

TEST(Intention, RefusedActionFailsAndPostsFailure) {
    FakeAgent ag({{"p", {EventKind::GoalAddition, atom("g"), {}}, {}, {Step::action(atom("move")), Step::add(atom("x"))}}});
    std::vector<std::string> failed;
    ag.reasoner.on_event_failed = [&](const Event& e) { failed.push_back(e.to_string()); };
    ag.reasoner.post(goal_event(atom("g")));
    ASSERT_TRUE(ag.reasoner.cycle(ag));
    ag.reasoner.action_refused();
    EXPECT_FALSE(ag.reasoner.busy());
    EXPECT_EQ(failed, std::vector<std::string>{"-!g"});
    EXPECT_FALSE(ag.reasoner.cycle(ag));
    EXPECT_FALSE(ag.beliefs().contains(atom("x")));
}

TEST(Intention, DurativeActionRepeatsAndSurvivesRefusal) {
    FakeAgent ag({{"p", {EventKind::GoalAddition, atom("g"), {}}, {}, {Step::action(atom("walk"))}}});
    ag.reasoner.post(goal_event(atom("g")));
    ASSERT_TRUE(ag.reasoner.cycle(ag));
    ag.reasoner.action_refused();
    EXPECT_TRUE(ag.reasoner.busy());
    ASSERT_TRUE(ag.reasoner.cycle(ag));
    EXPECT_EQ(ag.performed.size(), 2u);
}

TEST(Intention, OrgDirectiveAndSend) {
    FakeAgent ag({{"p",
                   {EventKind::GoalAddition, atom("g"), {}},
                   {},
                   {Step::send(I(2), atom("hello")), Step::org(atom("adopt_role", {Term::atom("explorer")})),
                    Step::org(atom("forbidden")), Step::add(atom("x"))}}});
    ag.reasoner.post(goal_event(atom("g")));
    EXPECT_FALSE(ag.reasoner.cycle(ag));
    EXPECT_EQ(ag.sent, std::vector<std::string>{"2:hello"});
    EXPECT_EQ(ag.directives, (std::vector<std::string>{"adopt_role(explorer)", "forbidden"}));
    EXPECT_FALSE(ag.beliefs().contains(atom("x")));
}

TEST(Intention, DelBeliefRemovesMatches) {
    FakeAgent ag({{"p", {EventKind::GoalAddition, atom("g"), {}}, {}, {Step::del(atom("clear", {Term::any(), Term::any()}))}}});
    ag.beliefs().add(cell_atom("clear", {1, 1}));
    ag.beliefs().add(cell_atom("clear", {2, 2}));
    ag.beliefs().add(cell_atom("pos", {2, 2}));
    ag.reasoner.post(goal_event(atom("g")));
    ag.reasoner.cycle(ag);
    EXPECT_EQ(ag.beliefs().size(), 1u);
}

// ------------------------------------------------------------ decide_move

namespace {

using D = MoveDecision;
constexpr D TI = D::TowardIntermediate, TT = D::TowardTarget, PB = D::PlaceBombAndRetreat, WB = D::WaitForBomb,
            DN = D::Done;

// [position A/B/C][intermediate absent/present][clear absent/present][bombs absent/0/1]
constexpr D kTable[3][2][2][3] = {
    // A: elsewhere
    {{{TT, TT, TT}, {TT, TT, TT}}, {{TI, TI, TI}, {TT, TT, TT}}},
    // B: at the target
    {{{DN, DN, DN}, {DN, DN, DN}}, {{DN, DN, DN}, {DN, DN, DN}}},
    // C: at the intermediate cell
    {{{TT, TT, TT}, {TT, TT, TT}}, {{WB, WB, PB}, {TT, TT, TT}}},
};

} // namespace

TEST(DecideMove, AllThirtySixAbstractStates) {
    const Cell A{1, 1}, B{7, 1}, C{4, 1};
    const Cell at[] = {A, B, C};
    int checked = 0;
    for (int p = 0; p < 3; ++p)
        for (int inter = 0; inter < 2; ++inter)
            for (int clear = 0; clear < 2; ++clear)
                for (int bombs = 0; bombs < 3; ++bombs) {
                    BeliefBase b;
                    b.add(cell_atom("pos", at[p]));
                    b.add(cell_atom("target", B));
                    if (inter) b.add(cell_atom("intermediate", C));
                    if (clear) b.add(cell_atom("clear", C));
                    if (bombs) b.add(atom("bombs", {I(bombs - 1)}));
                    EXPECT_EQ(decide_move(b), kTable[p][inter][clear][bombs])
                        << "pos " << p << " inter " << inter << " clear " << clear << " bombs " << bombs;
                    ++checked;
                }
    EXPECT_EQ(checked, 36);
}

TEST(DecideMove, NamedExamples) {
    BeliefBase b;
    b.add(cell_atom("pos", {3, 3}));
    b.add(cell_atom("target", {3, 3}));
    EXPECT_EQ(decide_move(b), D::Done);

    BeliefBase c;
    c.add(cell_atom("pos", {2, 1}));
    c.add(cell_atom("target", {5, 1}));
    c.add(cell_atom("intermediate", {2, 1}));
    c.add(atom("bombs", {I(1)}));
    EXPECT_EQ(decide_move(c), D::PlaceBombAndRetreat);

    c.add(cell_atom("pos", {1, 1}));
    c.add(atom("bombs", {I(0)}));
    EXPECT_EQ(decide_move(c), D::TowardIntermediate);
}

TEST(DecideMove, MissingBeliefs) {
    BeliefBase b;
    EXPECT_THROW(decide_move(b), MissingBelief);
    b.add(cell_atom("pos", {1, 1}));
    EXPECT_THROW(decide_move(b), MissingBelief);
}
