import numpy as np
import pytest

from privstream import Trace, TraceSet, load_csv, split, synth_trace
from privstream.traces import TraceFormatError, load_dir, save_csv, user_counts
from privstream.predictors import gaze_deltas


def write(path, rows, header="timestamp_s,yaw_deg,pitch_deg", eol="\n"):
    path.write_text(eol.join([header, *rows]) + eol, encoding="utf-8")
    return path


def lag1(x):
    x = x - x.mean()
    return float(np.dot(x[:-1], x[1:]) / np.dot(x, x))


class TestLoadCsv:
    def test_uniform_file_unchanged(self, tmp_path):
        p = write(tmp_path / "a__b.csv", ["0.0,10,5", "0.1,11,6", "0.2,12,7"])
        t = load_csv(p, tau=0.1, T_seg=0.1)
        assert t.samples.tolist() == [[10, 5], [11, 6], [12, 7]]
        assert (t.user_id, t.video_id) == ("a", "b")

    def test_crlf_accepted(self, tmp_path):
        p = write(tmp_path / "x.csv", ["0,1,2", "0.1,1,2", "0.2,1,2"], eol="\r\n")
        assert len(load_csv(p, 0.1, 0.1).samples) == 3

    def test_bad_field_names_row(self, tmp_path):
        p = write(tmp_path / "x.csv", ["0.0,10,5", "0.1,abc,6", "0.2,12,7"])
        with pytest.raises(TraceFormatError, match="line 3"):
            load_csv(p, 0.1, 0.1)

    def test_non_monotone(self, tmp_path):
        p = write(tmp_path / "x.csv", ["0.0,10,5", "0.2,11,6", "0.1,12,7"])
        with pytest.raises(TraceFormatError, match="line 4"):
            load_csv(p, 0.1, 0.1)

    def test_too_short(self, tmp_path):
        p = write(tmp_path / "x.csv", ["0.0,10,5", "0.1,11,6"])
        with pytest.raises(TraceFormatError, match="shorter"):
            load_csv(p, 0.1, 1.0)

    def test_bad_header(self, tmp_path):
        p = write(tmp_path / "x.csv", ["0,1,2"], header="t,yaw,pitch")
        with pytest.raises(TraceFormatError, match="line 1"):
            load_csv(p)

    def test_sixty_seconds(self, tmp_path):
        rows = [f"{i * 0.1:.1f},{(i % 360) - 180},0" for i in range(600)]
        t = load_csv(write(tmp_path / "x.csv", rows), tau=0.1, T_seg=1.0)
        assert len(t.samples) == 600
        assert t.L == 60

    def test_nearest_timestamp_resampling(self, tmp_path):
        # jittered clock; each grid time must take the closest row
        times = [0.0, 0.09, 0.21, 0.26, 0.41]
        rows = [f"{t},{i},0" for i, t in enumerate(times)]
        t = load_csv(write(tmp_path / "x.csv", rows), tau=0.1, T_seg=0.1)
        assert t.samples[:, 0].tolist() == [0, 1, 2, 3, 4]

    def test_save_load_idempotent(self, tmp_path):
        t = synth_trace(3, duration=5, T_seg=1)
        save_csv(t, tmp_path / "u__v.csv")
        back = load_csv(tmp_path / "u__v.csv", 0.1, 1.0)
        np.testing.assert_array_equal(back.samples, t.samples)
        save_csv(back, tmp_path / "u__w.csv")
        again = load_csv(tmp_path / "u__w.csv", 0.1, 1.0)
        np.testing.assert_array_equal(again.samples, back.samples)

    def test_load_dir(self, tmp_path):
        for i in range(3):
            save_csv(synth_trace(i, 3), tmp_path / f"u{i}__v0.csv")
        ts = load_dir(tmp_path)
        assert [t.user_id for t in ts] == ["u0", "u1", "u2"]


class TestSegments:
    def test_bounds(self):
        t = synth_trace(0, duration=5.0)
        assert t.samples_per_segment == 10
        assert t.segment_bounds(1) == (0, 10)
        assert t.segment_bounds(5) == (40, 50)
        with pytest.raises(ValueError):
            t.segment_bounds(6)

    def test_misaligned_segment(self):
        with pytest.raises(ValueError):
            Trace(np.zeros((30, 2)), tau=0.1, T_seg=0.25)

    def test_samples_read_only(self):
        t = synth_trace(0, 3)
        with pytest.raises(ValueError):
            t.samples[0, 0] = 1.0


class TestSynth:
    def test_deterministic(self):
        a, b = synth_trace(11, 10), synth_trace(11, 10)
        np.testing.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, synth_trace(12, 10).samples)

    def test_ranges(self):
        s = synth_trace(5, 300, speed=80, momentum=0.95).samples
        assert s[:, 0].min() >= -180 and s[:, 0].max() < 180
        assert np.abs(s[:, 1]).max() <= 90

    def test_momentum_zero_uncorrelated(self):
        d = gaze_deltas(synth_trace(1, 2000, momentum=0.0).samples)
        assert abs(lag1(d[:, 0])) < 0.05

    def test_momentum_high_correlated(self):
        d = gaze_deltas(synth_trace(2, 2000, momentum=0.95).samples)
        assert lag1(d[:, 0]) >= 0.9

    def test_bad_momentum(self):
        with pytest.raises(ValueError):
            synth_trace(0, 10, momentum=1.0)


class TestSplit:
    def traces(self, n):
        return [synth_trace(i, 2, user_id=f"u{i % 3}") for i in range(n)]

    def test_eight_two(self):
        train, test = split(TraceSet(self.traces(10), split_seed=4))
        assert (len(train), len(test)) == (8, 2)
        assert {id(t) for t in train}.isdisjoint(id(t) for t in test)

    def test_reproducible(self):
        ts = self.traces(10)
        a, b = split(TraceSet(ts, 9)), split(TraceSet(ts, 9))
        assert [id(t) for t in a[0]] == [id(t) for t in b[0]]

    def test_three_hundred(self):
        ts = [synth_trace(0, 2)] * 300
        train, test = split(TraceSet(ts))
        assert len(train) == 240 and len(test) == 60

    def test_rejections(self):
        with pytest.raises(ValueError):
            split(TraceSet(self.traces(4), train_fraction=1.0))
        with pytest.raises(ValueError):
            split(TraceSet(self.traces(1)))

    def test_user_counts(self):
        train, _ = split(TraceSet(self.traces(10), 1))
        counts = user_counts(train)
        assert sum(counts.values()) == 8
