# app/mslrt/pcit.py
from app.ec2st.evalues import point_evalues
from app.models.null_family import label_log_likelihoods
from app.models.sample import LabeledSet
from app.mslrt.families import NullFamily
from app.utils.exceptions import UsageError


def pcit_batch_log_evalue(alt_classifier, null_family: NullFamily, batch: LabeledSet) -> float:
    """Predictive conditional-independence e-value of one batch of (x, y, z).

    sum_n log p_A(y_n | x_n, z_n) - sum_n log p(y_n | z_n; MLE on this batch).
    With no (or constant) z and a Bernoulli null this is the classifier
    two-sample e-value.
    """
    if len(batch) == 0:
        raise UsageError("batch is empty")
    probs = alt_classifier.predict_proba(batch.x, batch.z)
    params = null_family.mle(batch)
    log_e, _ = point_evalues(label_log_likelihoods(probs, batch.y), null_family.log_density(batch, params))
    return log_e
