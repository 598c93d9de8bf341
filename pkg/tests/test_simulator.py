from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from depgrid import (
    Action,
    BehaviorMode,
    ConfigError,
    EnvConfig,
    EpisodeNotFinished,
    OutOfDomain,
    Scenario,
    ScriptedPolicy,
    ScriptedPolicyParams,
    SteppingTerminatedEpisode,
    classify,
    init,
    observe,
    run_episode,
    scenario_domain,
    step,
)


def noiseless(env: EnvConfig) -> EnvConfig:
    return dataclasses.replace(env, noise_sigma_speed=0.0,
                               noise_sigma_obstacle_pos=0.0,
                               noise_sigma_goal=0.0)


class TestInit:
    def test_start_state(self, env):
        s = init(env, Scenario.of(5.0, 0.0, 25.0))
        assert s.time == 0
        assert s.robot_pos == 0.0
        assert s.obstacle_leading_edge == 80.0
        assert not s.collided and s.collision_time is None

    def test_boundary_scenario_is_valid(self, env):
        s = init(env, Scenario.of(0.0, 10.0, 50.0))
        assert s.obstacle_leading_edge == 80.0

    def test_out_of_domain(self, env):
        with pytest.raises(OutOfDomain):
            init(env, Scenario.of(11.0, 0.0, 0.0))

    def test_scenario_domain_bounds(self, env):
        space = scenario_domain(env)
        assert space.names == ("v", "t", "y")
        assert space.dims[2].max == env.robot_bounds[1]


class TestObserve:
    def test_zero_noise_equals_truth(self, env):
        cfg = noiseless(env)
        s = init(cfg, Scenario.of(4.0, 2.0, 33.0))
        rng = np.random.default_rng(0)
        obs = observe(cfg, s, rng)
        assert obs.obstacle_pos_noisy == 80.0
        assert obs.robot_pos == 0.0
        assert obs.obstacle_speed_noisy == 4.0
        assert obs.goal_noisy == 33.0

    def test_fixed_seed_reproduces_sequence(self, env):
        s = init(env, Scenario.of(4.0, 2.0, 33.0))
        g1 = np.random.Generator(np.random.PCG64(99))
        g2 = np.random.Generator(np.random.PCG64(99))
        a = [observe(env, s, g1) for _ in range(10)]
        b = [observe(env, s, g2) for _ in range(10)]
        assert a == b

    def test_repeated_calls_match_block_draw(self, env):
        # run_episode pre-draws the episode noise as one (T, 3) block; this
        # pins the stream-order equivalence that optimization relies on
        s = init(env, Scenario.of(4.0, 2.0, 33.0))
        g1 = np.random.Generator(np.random.PCG64(7))
        g2 = np.random.Generator(np.random.PCG64(7))
        block = g2.standard_normal((6, 3))
        from depgrid.simulator import _observation
        for k in range(6):
            assert observe(env, s, g1) == _observation(env, s, block[k])

    def test_goal_noise_spread(self, env):
        s = init(env, Scenario.of(4.0, 2.0, 33.0))
        rng = np.random.default_rng(11)
        n = 100_000
        goals = np.array([observe(env, s, rng).goal_noisy for _ in range(n)])
        assert float(goals.std(ddof=1)) == pytest.approx(
            env.noise_sigma_goal, rel=0.02)
        assert float(goals.mean()) == pytest.approx(33.0, abs=0.02)


class TestStep:
    def test_forward_clips_at_top(self, env):
        s = init(env, Scenario.of(1.0, 10.0, 10.0))
        for _ in range(12):
            s = step(env, s, Action.FORWARD)
        assert s.robot_pos == 50.0
        s = step(env, s, Action.FORWARD)
        assert s.robot_pos == 50.0  # no error, no overshoot

    def test_backward_clips_at_bottom(self, env):
        s = init(env, Scenario.of(1.0, 10.0, 10.0))
        s = step(env, s, Action.BACKWARD)
        assert s.robot_pos == 0.0

    def test_fast_obstacle_kinematics_trace(self, env):
        # v=10, t=0: leading edge hits the column at time 8, clears at 9.
        # a robot holding at >= 25 then must collide at time 8
        s = init(env, Scenario.of(10.0, 0.0, 50.0))
        for _ in range(6):
            s = step(env, s, Action.FORWARD)   # at 30 after 6 steps
        assert s.robot_pos == 30.0
        s = step(env, s, Action.BACKWARD)      # 25, time 7, edge 10
        assert s.obstacle_leading_edge == pytest.approx(10.0)
        assert not s.collided
        s = step(env, s, Action.FORWARD)       # 30, time 8, edge 0: occupied
        assert s.collided and s.collision_time == 8.0

    def test_obstacle_waits_for_start_time(self, env):
        s = init(env, Scenario.of(10.0, 3.0, 10.0))
        for expect_edge in (80.0, 80.0, 80.0, 70.0, 60.0):
            s = step(env, s, Action.BACKWARD)
            assert s.obstacle_leading_edge == pytest.approx(expect_edge)

    def test_step_after_collision_rejected(self, env):
        s = init(env, Scenario.of(10.0, 0.0, 50.0))
        for _ in range(8):
            s = step(env, s, Action.FORWARD)
        assert s.collided
        with pytest.raises(SteppingTerminatedEpisode):
            step(env, s, Action.FORWARD)

    def test_step_after_time_limit_rejected(self, env):
        s = init(env, Scenario.of(0.0, 0.0, 0.0))
        for _ in range(env.episode_seconds):
            s = step(env, s, Action.BACKWARD)
        with pytest.raises(SteppingTerminatedEpisode):
            step(env, s, Action.BACKWARD)

    def test_position_stays_in_bounds_and_edge_non_increasing(self, env):
        rng = np.random.default_rng(2)
        for _ in range(20):
            v = float(rng.uniform(0, 10))
            t = float(rng.uniform(0, 10))
            s = init(env, Scenario.of(v, t, 25.0))
            prev_edge = s.obstacle_leading_edge
            while not s.collided and s.time < env.episode_seconds:
                a = Action.FORWARD if rng.random() < 0.5 else Action.BACKWARD
                s = step(env, s, a)
                assert 0.0 <= s.robot_pos <= 50.0
                assert s.obstacle_leading_edge <= prev_edge + 1e-12
                prev_edge = s.obstacle_leading_edge
            if s.collided:
                assert s.robot_pos >= env.danger_height
                edge = s.obstacle_leading_edge
                assert edge <= 0.0 < edge + env.obstacle_width


class TestClassify:
    def test_collision_dominates_goal(self, env):
        # reach the goal early, then collide: still a harmful failure
        s = init(env, Scenario.of(10.0, 0.0, 20.0))
        for _ in range(8):
            s = step(env, s, Action.FORWARD)
        assert s.max_robot_pos >= 20.0 and s.collided
        assert classify(env, s) is BehaviorMode.HARMFUL_FAILURE

    def test_success_by_running_maximum(self, env):
        # visit 30 >= goal 25 mid-episode, retreat afterwards
        s = init(env, Scenario.of(0.0, 0.0, 25.0))
        for _ in range(6):
            s = step(env, s, Action.FORWARD)
        while s.time < env.episode_seconds:
            s = step(env, s, Action.BACKWARD)
        assert s.robot_pos < 25.0 <= s.max_robot_pos
        assert classify(env, s) is BehaviorMode.SUCCESS

    def test_task_failure(self, env):
        s = init(env, Scenario.of(0.0, 0.0, 40.0))
        for _ in range(4):
            s = step(env, s, Action.FORWARD)   # hold at 20 < 40
        while s.time < env.episode_seconds:
            s = step(env, s, Action.BACKWARD)
        assert classify(env, s) is BehaviorMode.TASK_FAILURE

    def test_unfinished_episode_rejected(self, env):
        s = init(env, Scenario.of(1.0, 1.0, 10.0))
        s = step(env, s, Action.FORWARD)
        with pytest.raises(EpisodeNotFinished):
            classify(env, s)

    def test_modes_exclusive_and_exhaustive(self, env, scripted_factory):
        rng = np.random.default_rng(6)
        for i in range(60):
            x = Scenario.of(rng.uniform(0, 10), rng.uniform(0, 10),
                            rng.uniform(0, 50))
            r = run_episode(env, scripted_factory(), x, seed=i)
            assert r.mode in (BehaviorMode.SUCCESS, BehaviorMode.TASK_FAILURE,
                              BehaviorMode.HARMFUL_FAILURE)
            assert (r.collision_time is not None) == (
                r.mode is BehaviorMode.HARMFUL_FAILURE)


class TestRunEpisode:
    def test_goal_zero_is_immediate_success(self, env, scripted_factory):
        r = run_episode(env, scripted_factory(), Scenario.of(5.0, 5.0, 0.0), 3)
        assert r.mode is BehaviorMode.SUCCESS

    def test_stationary_obstacle_never_passes_patient_policy(
            self, env, patient_factory):
        r = run_episode(env, patient_factory(), Scenario.of(0.0, 5.0, 40.0), 4)
        assert r.mode is BehaviorMode.TASK_FAILURE
        assert r.final_position <= 20.0
        assert r.steps == env.episode_seconds

    def test_byte_identical_reruns(self, env, scripted_factory):
        x = Scenario.of(3.3, 4.4, 41.0)
        a = run_episode(env, scripted_factory(), x, 12345)
        b = run_episode(env, scripted_factory(), x, 12345)
        assert a == b

    def test_noiseless_outcome_is_seed_independent(self, env, params):
        cfg = noiseless(env)
        x = Scenario.of(2.0, 1.0, 30.0)
        outcomes = {
            run_episode(cfg, ScriptedPolicy(params, cfg), x, seed).mode
            for seed in (1, 2, 3, 99)
        }
        assert len(outcomes) == 1

    def test_collision_freezes_episode(self, env, scripted_factory):
        r = run_episode(env, scripted_factory(), Scenario.of(10.0, 0.0, 50.0), 8)
        assert r.mode is BehaviorMode.HARMFUL_FAILURE
        assert r.steps == r.collision_time < env.episode_seconds


class TestEnvConfigValidation:
    def test_danger_height_inside_bounds(self):
        with pytest.raises(ConfigError):
            EnvConfig(danger_height=60.0)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ConfigError):
            EnvConfig(noise_sigma_goal=-0.1)
