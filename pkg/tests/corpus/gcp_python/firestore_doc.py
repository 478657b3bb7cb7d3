from google.cloud import firestore

db = firestore.Client()


def handler(event, context):
    ref = db.collection("users").document("profile")
    ref.set({"name": event["name"]})
    snapshot = ref.get()
    return snapshot.to_dict()
