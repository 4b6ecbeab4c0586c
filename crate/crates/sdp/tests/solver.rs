use chordsos_sdp::{read_sdpa, solve, write_sdpa, Block, BlockMatrix, SdpOptions, SdpProblem, SdpStatus};

fn toy_two_by_two() -> SdpProblem {
    // minimize y s.t. [[y, 1], [1, y]] >= 0
    let mut f0 = BlockMatrix::new();
    f0.push(0, 0, 1, 1.0);
    let mut f1 = BlockMatrix::new();
    f1.push(0, 0, 0, 1.0);
    f1.push(0, 1, 1, 1.0);
    SdpProblem::new(vec![Block::Psd(2)], 0, f0, vec![f1], vec![1.0]).unwrap()
}

#[test]
fn toy_optimum_is_one() {
    let sol = solve(&toy_two_by_two(), &SdpOptions::default());
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.y[0] - 1.0).abs() < 1e-6, "y = {}", sol.y[0]);
    assert!((sol.primal_objective - 1.0).abs() < 1e-6);
    let r = &sol.residuals;
    assert!(r.primal <= 1e-7 && r.dual <= 1e-7 && r.gap <= 1e-7, "{r:?}");
}

#[test]
fn weakly_infeasible_lmi_is_reported() {
    // [[0, 1], [1, y]] is never PSD.
    let mut f0 = BlockMatrix::new();
    f0.push(0, 0, 1, 1.0);
    let mut f1 = BlockMatrix::new();
    f1.push(0, 1, 1, 1.0);
    let p = SdpProblem::new(vec![Block::Psd(2)], 0, f0, vec![f1], vec![0.0]).unwrap();
    let sol = solve(&p, &SdpOptions::default());
    assert_eq!(sol.status, SdpStatus::PrimalInfeasible, "{sol:?}");
}

#[test]
fn strongly_infeasible_lmi_has_farkas_ray() {
    // y >= 1 and y <= -1 on a diagonal block.
    let mut f0 = BlockMatrix::new();
    f0.push(0, 0, 0, -1.0);
    f0.push(0, 1, 1, -1.0);
    let mut f1 = BlockMatrix::new();
    f1.push(0, 0, 0, 1.0);
    f1.push(0, 1, 1, -1.0);
    let p = SdpProblem::new(vec![Block::Diag(2)], 0, f0, vec![f1], vec![1.0]).unwrap();
    let sol = solve(&p, &SdpOptions::default());
    assert_eq!(sol.status, SdpStatus::PrimalInfeasible);
    // Z >= 0, <F1, Z> = 0, <F0, Z> = -1.
    let z = &sol.dual_blocks[0];
    assert!(z.get(0, 0) >= -1e-9 && z.get(1, 1) >= -1e-9);
    assert!((z.get(0, 0) - z.get(1, 1)).abs() < 1e-6);
    assert!((-(z.get(0, 0) + z.get(1, 1)) + 1.0).abs() < 1e-6);
}

#[test]
fn unbounded_lmi_reports_dual_infeasible() {
    // minimize y s.t. [[1 + y]] >= 0 has optimum -1; minimizing -y is unbounded.
    let mut f0 = BlockMatrix::new();
    f0.push(0, 0, 0, 1.0);
    let mut f1 = BlockMatrix::new();
    f1.push(0, 0, 0, 1.0);
    let p = SdpProblem::new(vec![Block::Psd(1)], 0, f0, vec![f1], vec![1.0]).unwrap();
    let sol = solve(&p, &SdpOptions::default());
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.y[0] + 1.0).abs() < 1e-6);

    let mut f0 = BlockMatrix::new();
    f0.push(0, 0, 0, 1.0);
    let mut f1 = BlockMatrix::new();
    f1.push(0, 0, 0, 1.0);
    let p = SdpProblem::new(vec![Block::Psd(1)], 0, f0, vec![f1], vec![-1.0]).unwrap();
    let sol = solve(&p, &SdpOptions::default());
    assert_eq!(sol.status, SdpStatus::DualInfeasible);
    assert!(sol.y[0] > 0.0);
}

#[test]
fn free_segment_acts_as_equality() {
    // minimize y1 + y2 s.t. [[y1, 1], [1, y2]] >= 0 and y1 - 2 y2 == 0.
    let mut f0 = BlockMatrix::new();
    f0.push(0, 0, 1, 1.0);
    let mut f1 = BlockMatrix::new();
    f1.push(0, 0, 0, 1.0);
    f1.push_free(0, 1.0);
    let mut f2 = BlockMatrix::new();
    f2.push(0, 1, 1, 1.0);
    f2.push_free(0, -2.0);
    let p = SdpProblem::new(vec![Block::Psd(2)], 1, f0, vec![f1, f2], vec![1.0, 1.0]).unwrap();
    let sol = solve(&p, &SdpOptions::default());
    assert_eq!(sol.status, SdpStatus::Optimal);
    // y1 = 2 y2, y1 y2 = 1 -> y2 = 1/sqrt 2.
    let y2 = 1.0 / 2f64.sqrt();
    assert!((sol.y[1] - y2).abs() < 1e-6, "{:?}", sol.y);
    assert!((sol.y[0] - 2.0 * y2).abs() < 1e-6);
}

#[test]
fn sdpa_five_line_file() {
    let mut f1 = BlockMatrix::new();
    f1.push(0, 0, 0, 1.0);
    let p = SdpProblem::new(vec![Block::Psd(1)], 0, BlockMatrix::new(), vec![f1], vec![1.0]).unwrap();
    let text = write_sdpa(&p);
    assert_eq!(text.lines().count(), 5, "{text}");
    assert_eq!(read_sdpa(&text).unwrap(), p);
}

#[test]
fn sdpa_round_trip_and_sign_convention() {
    let p = toy_two_by_two();
    let text = write_sdpa(&p);
    // F0 = [[0, 1], [1, 0]] is written negated.
    assert!(text.lines().any(|l| l.starts_with("0 1 1 2 -1.0")), "{text}");
    let q = read_sdpa(&text).unwrap();
    assert_eq!(q, p);
}

#[test]
fn sdpa_reader_skips_comments_and_punctuation() {
    let text = "\"a comment\n* another\n1 = mDIM\n2 = nBLOCK\n{2, -1}\n(1.0)\n0 1 1 2 -1.0\n1 1 1 1 1.0\n1 1 2 2 1.0\n1 2 1 1 1.0\n";
    let p = read_sdpa(text).unwrap();
    assert_eq!(p.blocks, vec![Block::Psd(2), Block::Diag(1)]);
    assert_eq!(p.constraints.len(), 1);
    let sol = solve(&p, &SdpOptions::default());
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.y[0] - 1.0).abs() < 1e-6);
}

#[test]
fn sdpa_rejects_bad_lines() {
    assert!(read_sdpa("1\n1\n2\n1.0\n1 1 3 3 1.0\n").is_err());
    assert!(read_sdpa("1\n1\n2\n1.0\n1 1 x 1 1.0\n").is_err());
    assert!(read_sdpa("1\n").is_err());
}

#[test]
fn free_segment_exports_as_split_block() {
    let mut f1 = BlockMatrix::new();
    f1.push(0, 0, 0, 1.0);
    f1.push_free(0, 1.0);
    let mut f0 = BlockMatrix::new();
    f0.push_free(0, -3.0);
    let p = SdpProblem::new(vec![Block::Psd(1)], 1, f0, vec![f1], vec![1.0]).unwrap();
    let q = read_sdpa(&write_sdpa(&p)).unwrap();
    assert_eq!(q, p.split_free_vars());
    let a = solve(&p, &SdpOptions::default());
    let b = solve(&q, &SdpOptions::default());
    assert_eq!(a.status, SdpStatus::Optimal);
    assert_eq!(b.status, SdpStatus::Optimal);
    assert!((a.y[0] - 3.0).abs() < 1e-6 && (b.y[0] - 3.0).abs() < 1e-6);
}

#[test]
fn solve_is_deterministic() {
    let p = toy_two_by_two();
    let a = solve(&p, &SdpOptions::default());
    let b = solve(&p, &SdpOptions::default());
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
