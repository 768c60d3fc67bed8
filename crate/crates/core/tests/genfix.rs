// One-off generator for the third liar-analysis fixture. Run with
// `cargo test -p boxlogic --test genfix -- --ignored` to regenerate.

use boxlogic::derivation::check_derivation;
use boxlogic::formula::{parse, Formula};
use boxlogic::proofterm::{app, compile, defining, fresh_hyp, hyp, lam, schema};
use boxlogic::theory::{parse_theory_file, Direction, SchemaId};

#[test]
#[ignore]
fn generate_boxbotfalse() {
    let theory =
        parse_theory_file(&std::fs::read_to_string("tests/fixtures/liar_box.thy").unwrap())
            .unwrap();
    let p1 = parse("p1").unwrap();
    let not_p1 = parse("~p1").unwrap();

    // weak falsity: p1 -> []bot
    let x = fresh_hyp();
    let weakly_false = lam(
        x,
        p1.clone(),
        app(
            app(
                schema(SchemaId::BoxImp, &[p1.clone(), Formula::Bottom]),
                app(defining(&theory, 1, Direction::Forward), hyp(x, p1.clone())),
            ),
            app(
                schema(SchemaId::BoxIntro, std::slice::from_ref(&p1)),
                hyp(x, p1.clone()),
            ),
        ),
    );
    assert_eq!(weakly_false.conclusion, parse("p1 -> []bot").unwrap());

    // negation is false: ~p1 -> bot
    let n = fresh_hyp();
    let neg_false = lam(
        n,
        not_p1.clone(),
        app(
            hyp(n, not_p1.clone()),
            app(
                defining(&theory, 1, Direction::Backward),
                app(
                    schema(SchemaId::BoxIntro, std::slice::from_ref(&not_p1)),
                    hyp(n, not_p1.clone()),
                ),
            ),
        ),
    );
    assert_eq!(neg_false.conclusion, parse("~p1 -> bot").unwrap());

    // ([]bot -> bot) -> bot: assuming the unboxing law makes ~p1 out of
    // the weak falsity, contradicting the line above
    let h = fresh_hyp();
    let h_formula = parse("[]bot -> bot").unwrap();
    let y = fresh_hyp();
    let term = lam(
        h,
        h_formula.clone(),
        app(
            neg_false,
            lam(
                y,
                p1.clone(),
                app(
                    hyp(h, h_formula.clone()),
                    app(weakly_false, hyp(y, p1.clone())),
                ),
            ),
        ),
    );
    assert_eq!(term.conclusion, parse("([]bot -> bot) -> bot").unwrap());

    let derivation = compile(&term, &[]).unwrap();
    check_derivation(&theory, &derivation).unwrap();
    let json = serde_json::to_string_pretty(&derivation).unwrap();
    std::fs::write("tests/fixtures/boxbotfalse.drv", json + "\n").unwrap();
}
